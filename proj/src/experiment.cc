// Copyright 2026 The vflcost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vflcost/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vflcost/errors.h"
#include "vflcost/optimizer.h"
#include "vflcost/privacy.h"
#include "vflcost/variables.h"

namespace vflcost::experiment {
namespace {

using schemes::kAllSchemes;
using schemes::kClCi;
using schemes::kClDi;
using schemes::kDlCi;
using schemes::kDlDi;
using schemes::SchemeSpec;

constexpr double kBranchTolerance = 1e-9;
constexpr double kOrderingTolerance = 1e-9;
constexpr double kSymmetryTolerance = 1e-9;

// Runs fn(i) for i in [0, count) on `workers` threads. Results must be
// written to slot i so the assembly order is fixed.
template <typename Fn>
void ParallelFor(std::size_t count, int workers, Fn&& fn) {
  std::size_t threads = workers > 0
                            ? static_cast<std::size_t>(workers)
                            : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double ParseDouble(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || std::isnan(v)) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

long long ParseInt(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

std::string FormatExact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CheckOrdering(const schemes::SchemeLosses& l, const std::string& where) {
  const double clci = l[kClCi.index()];
  const double cldi = l[kClDi.index()];
  const double dlci = l[kDlCi.index()];
  const double dldi = l[kDlDi.index()];
  if (clci > std::min(cldi, dlci) + kOrderingTolerance ||
      std::max(cldi, dlci) > dldi + kOrderingTolerance) {
    throw NumericalError("loss ordering violated at " + where);
  }
}

std::array<Bits, 4> ToArray(const schemes::SchemeLosses& l) {
  return {l[0], l[1], l[2], l[3]};
}

std::string EscapeXml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::pair<double, double> Padded(double lo, double hi) {
  double pad = 0.05 * (hi - lo);
  if (!(pad > 0.0)) pad = 0.05 * std::max(1.0, std::abs(hi));
  return {lo - pad, hi + pad};
}

}  // namespace

std::string_view ExperimentName(Experiment e) {
  switch (e) {
    case Experiment::kSweepR: return "sweep_r";
    case Experiment::kSweepEps: return "sweep_eps";
    case Experiment::kCostTable: return "cost_table";
    case Experiment::kLoss: return "loss";
    case Experiment::kPrivacyAudit: return "privacy_audit";
  }
  return "?";
}

Experiment ParseExperiment(std::string_view name) {
  for (auto e : {Experiment::kSweepR, Experiment::kSweepEps,
                 Experiment::kCostTable, Experiment::kLoss,
                 Experiment::kPrivacyAudit}) {
    if (ExperimentName(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::Defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.agents =
      (e == Experiment::kSweepEps || e == Experiment::kPrivacyAudit) ? 3 : 2;
  return c;
}

void ExperimentConfig::Validate() const {
  if (agents != 2 && agents != 3) throw ConfigError("agents must be 2 or 3");
  if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("r must lie in [0, 1]");
  if (r_points < 2) throw ConfigError("r_points must be >= 2");
  try {
    hyper.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n < 0) throw ConfigError("N must be >= 0");
  if (quadrature_nodes < 8) throw ConfigError("quadrature_nodes must be >= 8");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (max_terms == 0) throw ConfigError("max_terms must be positive");
  if (!(eps_min >= 0.0) || !(eps_max >= eps_min) || !std::isfinite(eps_max)) {
    throw ConfigError("epsilon grid needs 0 <= eps_min <= eps_max < inf");
  }
  if (eps_steps < 1) throw ConfigError("eps_steps must be >= 1");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("s must lie in [0, 1]");
  if (experiment == Experiment::kSweepR && agents != 2) {
    throw ConfigError("sweep_r is defined for two agents");
  }
  if (experiment == Experiment::kSweepEps && agents != 3) {
    throw ConfigError("sweep_eps is defined for three agents");
  }
}

std::vector<double> ExperimentConfig::RGrid() const {
  std::vector<double> grid(r_points);
  for (int i = 0; i < r_points; ++i) {
    grid[i] = static_cast<double>(i) / (r_points - 1);
  }
  return grid;
}

std::vector<double> ExperimentConfig::EpsilonGrid() const {
  if (eps_steps == 1) return {eps_min};
  std::vector<double> grid(eps_steps);
  for (int i = 0; i < eps_steps; ++i) {
    grid[i] = eps_min + (eps_max - eps_min) * i / (eps_steps - 1);
  }
  return grid;
}

ExperimentConfig ParseConfig(std::string_view text,
                             const ExperimentConfig& base) {
  ExperimentConfig c = base;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = Trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header");
      }
      section = Trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = Trim(std::string_view(line).substr(0, eq));
    const std::string value = Trim(std::string_view(line).substr(eq + 1));
    const std::string full = section + "." + key;
    if (full == ".experiment" || full == "run.experiment") {
      c.experiment = ParseExperiment(value);
    } else if (full == "model.agents") {
      c.agents = static_cast<int>(ParseInt(full, value));
    } else if (full == "model.r") {
      c.r = ParseDouble(full, value);
    } else if (full == "model.r_points") {
      c.r_points = static_cast<int>(ParseInt(full, value));
    } else if (full == "model.alpha1") {
      c.hyper.alpha1 = ParseDouble(full, value);
    } else if (full == "model.beta1") {
      c.hyper.beta1 = ParseDouble(full, value);
    } else if (full == "model.alpha2") {
      c.hyper.alpha2 = ParseDouble(full, value);
    } else if (full == "model.beta2") {
      c.hyper.beta2 = ParseDouble(full, value);
    } else if (full == "run.N") {
      c.n = static_cast<int>(ParseInt(full, value));
    } else if (full == "run.backend") {
      if (value == "conjugate") {
        c.backend = Backend::kConjugate;
      } else if (value == "quadrature") {
        c.backend = Backend::kQuadrature;
      } else {
        throw ConfigError("backend must be 'conjugate' or 'quadrature'");
      }
    } else if (full == "run.quadrature_nodes") {
      c.quadrature_nodes = static_cast<int>(ParseInt(full, value));
    } else if (full == "run.workers") {
      c.workers = static_cast<int>(ParseInt(full, value));
    } else if (full == "run.max_terms") {
      const long long v = ParseInt(full, value);
      if (v <= 0) throw ConfigError("max_terms must be positive");
      c.max_terms = static_cast<std::uint64_t>(v);
    } else if (full == "privacy.eps_min") {
      c.eps_min = ParseDouble(full, value);
    } else if (full == "privacy.eps_max") {
      c.eps_max = ParseDouble(full, value);
    } else if (full == "privacy.eps_steps") {
      c.eps_steps = static_cast<int>(ParseInt(full, value));
    } else if (full == "privacy.epsilon") {
      c.epsilon = ParseDouble(full, value);
    } else if (full == "privacy.s") {
      c.s = ParseDouble(full, value);
    } else if (full == "output.csv") {
      c.csv_path = value;
    } else if (full == "output.svg") {
      c.svg_path = value;
    } else {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": unknown key '" + full + "'");
    }
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path,
                            const ExperimentConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), base);
}

std::string SerializeConfig(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "experiment = " << ExperimentName(c.experiment) << "\n\n";
  out << "[model]\n";
  out << "agents = " << c.agents << "\n";
  out << "r = " << FormatExact(c.r) << "\n";
  out << "r_points = " << c.r_points << "\n";
  out << "alpha1 = " << FormatExact(c.hyper.alpha1) << "\n";
  out << "beta1 = " << FormatExact(c.hyper.beta1) << "\n";
  out << "alpha2 = " << FormatExact(c.hyper.alpha2) << "\n";
  out << "beta2 = " << FormatExact(c.hyper.beta2) << "\n\n";
  out << "[run]\n";
  out << "N = " << c.n << "\n";
  out << "backend = "
      << (c.backend == Backend::kConjugate ? "conjugate" : "quadrature")
      << "\n";
  out << "quadrature_nodes = " << c.quadrature_nodes << "\n";
  out << "workers = " << c.workers << "\n";
  out << "max_terms = " << c.max_terms << "\n\n";
  out << "[privacy]\n";
  out << "eps_min = " << FormatExact(c.eps_min) << "\n";
  out << "eps_max = " << FormatExact(c.eps_max) << "\n";
  out << "eps_steps = " << c.eps_steps << "\n";
  out << "epsilon = " << FormatExact(c.epsilon) << "\n";
  out << "s = " << FormatExact(c.s) << "\n\n";
  out << "[output]\n";
  out << "csv = " << c.csv_path << "\n";
  out << "svg = " << c.svg_path << "\n";
  return out.str();
}

std::unique_ptr<bayes::ParameterIntegrator> MakeIntegrator(
    const ExperimentConfig& config, double r) {
  const bayes::ParityModelSpec spec{config.agents, r, config.hyper};
  if (config.backend == Backend::kConjugate) {
    return std::make_unique<bayes::ConjugateIntegrator>(spec);
  }
  return std::make_unique<bayes::GridIntegrator>(
      std::make_shared<const bayes::ModelClass>(
          bayes::BuildParityModelQuadrature(spec, config.quadrature_nodes)));
}

SweepResult RunSweepR(const ExperimentConfig& config) {
  config.Validate();
  const schemes::EngineOptions options{config.max_terms};
  const int last = config.r_points - 1;
  // One representative r <= 1/2 per abscissa, largest r first so that the
  // abscissa 1 - H_b(r) ascends.
  std::vector<int> reps;
  for (int i = last / 2; i >= 0; --i) reps.push_back(i);

  SweepResult result;
  result.sweep_label = "I(X1;X2) (bits)";
  result.rows.resize(reps.size());
  ParallelFor(reps.size(), config.workers, [&](std::size_t j) {
    const double r = static_cast<double>(reps[j]) / last;
    const auto losses = schemes::WorstCase(
        schemes::NonprivateLosses(*MakeIntegrator(config, r), config.n,
                                  options));
    CheckOrdering(losses, "r = " + FormatValue(r));
    const double mirror = 1.0 - r;
    if (mirror != r) {
      const auto other = schemes::WorstCase(schemes::NonprivateLosses(
          *MakeIntegrator(config, mirror), config.n, options));
      CheckOrdering(other, "r = " + FormatValue(mirror));
      for (std::size_t i = 0; i < 4; ++i) {
        if (!(std::abs(other[i] - losses[i]) <= kBranchTolerance)) {
          throw NumericalError("branches r = " + FormatValue(r) +
                               " and 1 - r disagree");
        }
      }
    }
    SweepRow& row = result.rows[j];
    row.sweep_value = 1.0 - infomath::BinaryEntropy(r);
    row.losses = ToArray(losses);
  });
  return result;
}

SweepResult RunSweepEps(const ExperimentConfig& config) {
  config.Validate();
  const schemes::EngineOptions options{config.max_terms};
  const auto epsilons = config.EpsilonGrid();
  SweepResult result;
  result.sweep_label = "epsilon (bits)";
  result.has_mechanism = true;
  result.rows.resize(epsilons.size());

  std::size_t workers = config.workers > 0
                            ? static_cast<std::size_t>(config.workers)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, epsilons.size());
  // Each worker owns a solver over a contiguous block of the grid.
  const std::size_t block = (epsilons.size() + workers - 1) / workers;
  ParallelFor(workers, static_cast<int>(workers), [&](std::size_t w) {
    const auto model = MakeIntegrator(config, config.r);
    optimizer::PrivateLossSolver solver(
        *model, optimizer::MechanismFamily::Xor(config.agents), config.n,
        options);
    for (std::size_t i = w * block;
         i < std::min(epsilons.size(), (w + 1) * block); ++i) {
      SweepRow& row = result.rows[i];
      row.sweep_value = epsilons[i];
      for (const auto& scheme : kAllSchemes) {
        const auto point = solver.Solve(scheme, epsilons[i]);
        row.losses[scheme.index()] = point.loss;
        if (scheme == kClCi) row.mechanism_s = point.mechanism.s;
      }
    }
  });
  return result;
}

SweepResult RunLoss(const ExperimentConfig& config) {
  config.Validate();
  const schemes::EngineOptions options{config.max_terms};
  const auto model = MakeIntegrator(config, config.r);
  SweepResult result;
  result.sweep_label = "epsilon (bits)";
  SweepRow row;
  row.sweep_value = config.epsilon;
  if (std::isinf(config.epsilon)) {
    row.losses = ToArray(
        schemes::WorstCase(schemes::NonprivateLosses(*model, config.n, options)));
  } else {
    result.has_mechanism = true;
    optimizer::PrivateLossSolver solver(
        *model, optimizer::MechanismFamily::Xor(config.agents), config.n,
        options);
    for (const auto& scheme : kAllSchemes) {
      const auto point = solver.Solve(scheme, config.epsilon);
      row.losses[scheme.index()] = point.loss;
      if (scheme == kClCi) row.mechanism_s = point.mechanism.s;
    }
  }
  result.rows.push_back(row);
  return result;
}

CostTable RunCostTable(const ExperimentConfig& config) {
  config.Validate();
  const schemes::EngineOptions options{config.max_terms};
  const auto model = MakeIntegrator(config, config.r);
  const auto reports = schemes::NonprivateLosses(*model, config.n, options);
  for (const auto& scheme : kAllSchemes) {
    const auto& per_agent = reports[scheme.index()].per_agent_loss;
    const auto [lo, hi] = std::minmax_element(per_agent.begin(), per_agent.end());
    if (*hi - *lo > kSymmetryTolerance) {
      throw ConfigError("agents are not symmetric under " +
                        std::string(scheme.name()) + ": per-agent losses " +
                        "differ by " + FormatValue(*hi - *lo));
    }
  }
  const auto losses = schemes::WorstCase(reports);
  CheckOrdering(losses, "r = " + FormatValue(config.r));

  CostTable table;
  for (const auto& a : kAllSchemes) {
    for (const auto& b : kAllSchemes) {
      const bool ordered = a == b || schemes::IsOrderedCostCell(a, b);
      if (ordered) {
        table.cost[a.index()][b.index()] = schemes::Cost(a, b, losses);
      }
    }
  }
  for (const auto& b : kAllSchemes) {
    for (const auto& a : kAllSchemes) {
      if (!schemes::IsOrderedCostCell(a, b)) continue;
      CostCell cell{a, b};
      cell.loss_difference = *table.cost[a.index()][b.index()];
      cell.cmi = schemes::CostCellCmi(*model, a, b, 1, config.n, options);
      cell.gap = std::abs(cell.loss_difference - cell.cmi);
      table.cells.push_back(cell);
    }
  }
  return table;
}

AuditReport RunPrivacyAudit(const ExperimentConfig& config) {
  config.Validate();
  const auto marginal = bayes::ParityFeatureLaw(config.agents, config.r);
  const auto channel =
      privacy::ChannelFromXorFamily({config.agents, config.s});
  const auto audit = privacy::AuditPrivacy(channel, marginal, config.epsilon);
  AuditReport report;
  report.s = config.s;
  report.epsilon = config.epsilon;
  report.per_agent_cmi = audit.per_agent_cmi;
  report.feasible = audit.feasible;
  for (int k = 1; k <= config.agents; ++k) {
    if (config.agents == 3) {
      report.closed_form.push_back(
          privacy::ClosedFormCmiThreeAgent(config.s, config.r, k));
    } else {
      report.closed_form.push_back(std::nullopt);
    }
  }
  report.least_noise_s = std::isinf(config.epsilon)
                             ? 0.0
                             : privacy::LeastNoiseXorS(marginal, config.epsilon);
  return report;
}

std::string FormatValue(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string SweepCsv(const SweepResult& result) {
  std::string out = "sweep_value,clci_bits,cldi_bits,dlci_bits,dldi_bits";
  if (result.has_mechanism) out += ",mechanism_s";
  out += "\n";
  for (const auto& row : result.rows) {
    out += FormatValue(row.sweep_value);
    for (double l : row.losses) out += "," + FormatValue(l);
    if (result.has_mechanism) {
      out += ",";
      if (row.mechanism_s) out += FormatValue(*row.mechanism_s);
    }
    out += "\n";
  }
  return out;
}

std::string CostTableCsv(const CostTable& table) {
  std::string out = "scheme_a,scheme_b,loss_difference_bits,cmi_bits,abs_gap\n";
  for (const auto& cell : table.cells) {
    out += std::string(cell.a.name()) + "," + std::string(cell.b.name()) +
           "," + FormatValue(cell.loss_difference) + "," +
           FormatValue(cell.cmi) + "," + FormatValue(cell.gap) + "\n";
  }
  return out;
}

std::string AuditCsv(const AuditReport& report) {
  std::string out =
      "agent,s,epsilon,cmi_bits,closed_form_bits,feasible,least_noise_s\n";
  for (std::size_t k = 0; k < report.per_agent_cmi.size(); ++k) {
    out += std::to_string(k + 1) + "," + FormatValue(report.s) + "," +
           FormatValue(report.epsilon) + "," +
           FormatValue(report.per_agent_cmi[k]) + ",";
    if (report.closed_form[k]) out += FormatValue(*report.closed_form[k]);
    out += std::string(",") + (report.feasible ? "true" : "false") + "," +
           FormatValue(report.least_noise_s) + "\n";
  }
  return out;
}

SweepResult ParseSweepCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  SweepResult result;
  if (line == "sweep_value,clci_bits,cldi_bits,dlci_bits,dldi_bits,mechanism_s") {
    result.has_mechanism = true;
  } else if (line != "sweep_value,clci_bits,cldi_bits,dlci_bits,dldi_bits") {
    throw ConfigError("unexpected CSV header '" + line + "'");
  }
  const std::size_t columns = result.has_mechanism ? 6 : 5;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != columns) throw ConfigError("CSV row has wrong arity");
    SweepRow row;
    row.sweep_value = ParseDouble("sweep_value", fields[0]);
    for (std::size_t i = 0; i < 4; ++i) {
      row.losses[i] = ParseDouble("loss", fields[i + 1]);
    }
    if (result.has_mechanism && !fields[5].empty()) {
      row.mechanism_s = ParseDouble("mechanism_s", fields[5]);
    }
    result.rows.push_back(row);
  }
  return result;
}

std::string SvgChart(const SweepResult& result) {
  if (result.rows.size() < 2) {
    throw std::invalid_argument("a chart needs at least two rows");
  }
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 150, kTop = 20, kBottom = 60;
  constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#ff7f0e",
                                                  "#2ca02c", "#d62728"};
  double xmin = result.rows.front().sweep_value, xmax = xmin;
  double ymin = result.rows.front().losses[0], ymax = ymin;
  for (const auto& row : result.rows) {
    xmin = std::min(xmin, row.sweep_value);
    xmax = std::max(xmax, row.sweep_value);
    for (double l : row.losses) {
      ymin = std::min(ymin, l);
      ymax = std::max(ymax, l);
    }
  }
  const auto [x0, x1] = Padded(xmin, xmax);
  const auto [y0, y1] = Padded(ymin, ymax);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * plot_w; };
  const auto py = [&](double y) {
    return kTop + (1.0 - (y - y0) / (y1 - y0)) * plot_h;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\" data-x-min=\"" << FormatValue(x0) << "\" data-x-max=\""
      << FormatValue(x1) << "\" data-y-min=\"" << FormatValue(y0)
      << "\" data-y-max=\"" << FormatValue(y1) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  svg << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    svg << "<text x=\"" << Fixed(px(xv)) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << Short(xv) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << Fixed(py(yv) + 4)
        << "\" text-anchor=\"end\">" << Short(yv) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">" << EscapeXml(result.sweep_label)
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">predictive loss (bits)</text>\n";
  svg << "</g>\n";

  for (const auto& scheme : kAllSchemes) {
    const std::size_t s = scheme.index();
    svg << "<polyline fill=\"none\" stroke=\"" << kColors[s]
        << "\" stroke-width=\"2\" data-scheme=\"" << scheme.name()
        << "\" points=\"";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      if (i > 0) svg << " ";
      svg << Fixed(px(result.rows[i].sweep_value)) << ","
          << Fixed(py(result.rows[i].losses[s]));
    }
    svg << "\"/>\n";
  }
  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const auto& scheme : kAllSchemes) {
    const std::size_t s = scheme.index();
    const double ly = kTop + 20 + 20 * static_cast<double>(s);
    const double lx = kLeft + plot_w + 15;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 25
        << "\" y2=\"" << ly << "\" stroke=\"" << kColors[s]
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << lx + 32 << "\" y=\"" << ly + 4 << "\">"
        << scheme.name() << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void EmitCsv(const SweepResult& result, const std::string& path) {
  WriteFile(path, SweepCsv(result));
}

void EmitSvgChart(const SweepResult& result, const std::string& path) {
  WriteFile(path, SvgChart(result));
}

}  // namespace vflcost::experiment
