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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "vflcost/errors.h"
#include "vflcost/experiment.h"
#include "vflcost/privacy.h"
#include "vflcost/schemes.h"

namespace vflcost::experiment {
namespace {

using schemes::kClCi;
using schemes::kDlDi;

ExperimentConfig Small(Experiment e) {
  auto c = ExperimentConfig::Defaults(e);
  c.r_points = 5;
  c.eps_steps = 5;
  c.workers = 1;
  return c;
}

// Tag balance and attribute quoting; enough to catch broken markup.
bool WellFormed(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const auto end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty();
}

double Attr(const std::string& xml, const std::string& name) {
  const std::regex re(name + "=\"([^\"]+)\"");
  std::smatch m;
  REQUIRE(std::regex_search(xml, m, re));
  return std::strtod(m[1].str().c_str(), nullptr);
}

TEST_CASE("experiment names") {
  for (auto e : {Experiment::kSweepR, Experiment::kSweepEps,
                 Experiment::kCostTable, Experiment::kLoss,
                 Experiment::kPrivacyAudit}) {
    CHECK(ParseExperiment(ExperimentName(e)) == e);
  }
  CHECK_THROWS_AS(ParseExperiment("sweep"), ConfigError);
}

TEST_CASE("defaults carry the reference settings") {
  const auto r = ExperimentConfig::Defaults(Experiment::kSweepR);
  CHECK(r.agents == 2);
  CHECK(r.n == 3);
  CHECK(r.hyper.alpha1 == 2.0);
  CHECK(r.hyper.beta1 == 1.5);
  CHECK(r.hyper.alpha2 == 1.5);
  CHECK(r.hyper.beta2 == 2.0);
  CHECK(r.RGrid().size() == 41);
  CHECK(r.RGrid()[20] == 0.5);
  const auto e = ExperimentConfig::Defaults(Experiment::kSweepEps);
  CHECK(e.agents == 3);
  CHECK(e.r == 0.5);
  const auto eps = e.EpsilonGrid();
  CHECK(eps.size() == 41);
  CHECK(eps.front() == 0.0);
  CHECK(eps.back() == 1.0);
  CHECK(std::is_sorted(eps.begin(), eps.end()));
  CHECK_NOTHROW(r.Validate());
  CHECK_NOTHROW(e.Validate());
}

TEST_CASE("config round trip") {
  auto c = ExperimentConfig::Defaults(Experiment::kSweepEps);
  c.r = 0.1234567890123456;
  c.hyper = {0.7, 1.0 / 3.0, 2.5, 9.75};
  c.n = 4;
  c.backend = Backend::kQuadrature;
  c.quadrature_nodes = 64;
  c.workers = 3;
  c.max_terms = 12345;
  c.eps_min = 0.1;
  c.eps_max = 0.9;
  c.eps_steps = 17;
  c.epsilon = 0.3;
  c.s = 1e-7;
  c.csv_path = "out/eps.csv";
  c.svg_path = "out/eps.svg";
  const auto text = SerializeConfig(c);
  const auto back = ParseConfig(text);
  CHECK(back == c);
  CHECK(SerializeConfig(back) == text);
  const auto defaults = ExperimentConfig::Defaults(Experiment::kLoss);
  CHECK(ParseConfig(SerializeConfig(defaults)) == defaults);
  CHECK(std::isinf(ParseConfig(SerializeConfig(defaults)).epsilon));
}

TEST_CASE("config parsing") {
  const auto c = ParseConfig(
      "# comment\n"
      "experiment = sweep_eps\n"
      "[model]\n"
      "  agents = 3   ; trailing comment\n"
      "r=0.25\n"
      "\n"
      "[run]\n"
      "N = 2\n"
      "backend = quadrature\n");
  CHECK(c.experiment == Experiment::kSweepEps);
  CHECK(c.agents == 3);
  CHECK(c.r == 0.25);
  CHECK(c.n == 2);
  CHECK(c.backend == Backend::kQuadrature);
  CHECK(c.eps_steps == 41);

  CHECK_THROWS_AS(ParseConfig("[model]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("[model]\nr = abc\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("[model]\nagents = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("[model\nr = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("[run]\nbackend = magic\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("r 0.1\n"), ConfigError);
  CHECK_THROWS_AS(LoadConfig("/nonexistent/config.ini"), IoError);
}

TEST_CASE("config validation") {
  auto c = ExperimentConfig::Defaults(Experiment::kSweepR);
  c.agents = 3;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kSweepEps);
  c.agents = 2;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kLoss);
  c.r = 1.5;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kLoss);
  c.n = -1;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kLoss);
  c.eps_max = -0.5;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kLoss);
  c.r_points = 1;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kLoss);
  c.quadrature_nodes = 4;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kLoss);
  c.hyper.beta2 = 0.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig::Defaults(Experiment::kLoss);
  c.s = 2.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("r sweep") {
  const auto result = RunSweepR(Small(Experiment::kSweepR));
  // r in {0, 0.25, 0.5} represent the five grid points.
  REQUIRE(result.rows.size() == 3);
  CHECK(!result.has_mechanism);
  CHECK(result.rows.front().sweep_value == 0.0);
  CHECK(result.rows.back().sweep_value == 1.0);
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    CHECK(result.rows[i].sweep_value > result.rows[i - 1].sweep_value);
  }
  const auto& last = result.rows.back().losses;
  for (double l : last) CHECK(std::abs(l - last[0]) < 1e-9);
  for (const auto& row : result.rows) {
    for (double l : row.losses) {
      CHECK(std::isfinite(l));
      CHECK(l >= 0.0);
    }
  }
}

TEST_CASE("epsilon sweep") {
  const auto result = RunSweepEps(Small(Experiment::kSweepEps));
  REQUIRE(result.rows.size() == 5);
  CHECK(result.has_mechanism);
  const auto& first = result.rows.front();
  for (double l : first.losses) CHECK(std::abs(l - first.losses[0]) < 1e-12);
  CHECK(first.mechanism_s == 0.5);
  CHECK(result.rows.back().mechanism_s == 0.0);
  for (const auto& row : result.rows) {
    CHECK(row.losses[kDlDi.index()] == first.losses[kDlDi.index()]);
  }
}

TEST_CASE("sweeps do not depend on the worker count") {
  auto c = Small(Experiment::kSweepEps);
  const auto one = SweepCsv(RunSweepEps(c));
  c.workers = 3;
  CHECK(SweepCsv(RunSweepEps(c)) == one);
  c.workers = 8;
  CHECK(SweepCsv(RunSweepEps(c)) == one);

  auto r = Small(Experiment::kSweepR);
  r.r_points = 9;
  const auto serial = SweepCsv(RunSweepR(r));
  r.workers = 4;
  CHECK(SweepCsv(RunSweepR(r)) == serial);
  CHECK(SweepCsv(RunSweepR(r)) == serial);
}

TEST_CASE("single loss evaluation") {
  auto c = Small(Experiment::kLoss);
  const auto open = RunLoss(c);
  REQUIRE(open.rows.size() == 1);
  CHECK(!open.has_mechanism);
  const auto direct = schemes::WorstCase(
      schemes::NonprivateLosses(*MakeIntegrator(c, c.r), c.n));
  for (std::size_t i = 0; i < 4; ++i) CHECK(open.rows[0].losses[i] == direct[i]);

  c.agents = 3;
  c.epsilon = 0.0;
  const auto closed = RunLoss(c);
  CHECK(closed.has_mechanism);
  CHECK(closed.rows[0].mechanism_s == 0.5);
}

TEST_CASE("cost table") {
  auto c = Small(Experiment::kCostTable);
  const auto table = RunCostTable(c);
  CHECK(table.cells.size() == 5);
  for (const auto& cell : table.cells) {
    CHECK(cell.gap <= 1e-9);
    CHECK(cell.loss_difference >= 0.0);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(table.cost[i][i].has_value());
    CHECK(*table.cost[i][i] == 0.0);
  }
  CHECK(!table.cost[1][2].has_value());
  CHECK(!table.cost[2][1].has_value());
  CHECK(!table.cost[0][3].has_value());
  CHECK(table.cost[3][0].has_value());
  const auto csv = CostTableCsv(table);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.rfind("scheme_a,scheme_b,loss_difference_bits,cmi_bits,abs_gap\n",
                  0) == 0);

  c.agents = 3;
  c.r = 0.2;
  CHECK_THROWS_AS(RunCostTable(c), ConfigError);
}

TEST_CASE("privacy audit report") {
  auto c = Small(Experiment::kPrivacyAudit);
  c.s = 0.0;
  c.epsilon = 1.0;
  const auto report = RunPrivacyAudit(c);
  REQUIRE(report.per_agent_cmi.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(report.per_agent_cmi[k] == doctest::Approx(1.0));
    REQUIRE(report.closed_form[k].has_value());
    CHECK(std::abs(*report.closed_form[k] - report.per_agent_cmi[k]) < 1e-9);
  }
  CHECK(report.feasible);
  CHECK(report.least_noise_s == 0.0);
  const auto csv = AuditCsv(report);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  c.agents = 2;
  const auto two = RunPrivacyAudit(c);
  CHECK(!two.closed_form[0].has_value());
}

TEST_CASE("CSV layout and round trip") {
  SweepResult result;
  result.has_mechanism = true;
  result.rows = {{0.0, {0.9, 0.8, 0.85, 1.0}, 0.5},
                 {0.5, {1.0 / 3.0, 0.123456789012345, 0.7, 0.9}, 0.12},
                 {1.0, {0.1, 0.2, 0.3, 0.4}, std::nullopt}};
  const auto csv = SweepCsv(result);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.rfind(
            "sweep_value,clci_bits,cldi_bits,dlci_bits,dldi_bits,mechanism_s\n",
            0) == 0);
  CHECK(csv.find("0.333333333333,") != std::string::npos);
  const auto back = ParseSweepCsv(csv);
  REQUIRE(back.rows.size() == 3);
  CHECK(back.has_mechanism);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(back.rows[i].sweep_value - result.rows[i].sweep_value) <
          1e-12);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(std::abs(back.rows[i].losses[j] - result.rows[i].losses[j]) < 1e-12);
    }
    CHECK(back.rows[i].mechanism_s.has_value() ==
          result.rows[i].mechanism_s.has_value());
  }
  CHECK(SweepCsv(result) == csv);
  result.has_mechanism = false;
  CHECK(ParseSweepCsv(SweepCsv(result)).rows.size() == 3);
  CHECK_THROWS_AS(ParseSweepCsv("a,b\n1,2\n"), ConfigError);
  CHECK(FormatValue(0.1) == "0.1");
  CHECK(FormatValue(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("SVG chart") {
  const auto result = RunSweepEps(Small(Experiment::kSweepEps));
  const auto svg = SvgChart(result);
  CHECK(WellFormed(svg));
  std::size_t polylines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos;
       p = svg.find("<polyline", p + 1)) {
    ++polylines;
  }
  CHECK(polylines == 4);
  for (const char* label : {">CL/CI<", ">CL/DI<", ">DL/CI<", ">DL/DI<",
                            ">predictive loss (bits)<", ">epsilon (bits)<"}) {
    CHECK(svg.find(label) != std::string::npos);
  }

  // The constant DL/DI series is a horizontal line.
  const std::regex dldi("data-scheme=\"DL/DI\" points=\"([^\"]+)\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, dldi));
  std::istringstream pts(m[1].str());
  std::string pt;
  std::set<std::string> ys;
  while (pts >> pt) ys.insert(pt.substr(pt.find(',') + 1));
  CHECK(ys.size() == 1);

  // Axis bounds cover the data with 5% padding.
  double ymin = 10, ymax = -10;
  for (const auto& row : result.rows) {
    for (double l : row.losses) {
      ymin = std::min(ymin, l);
      ymax = std::max(ymax, l);
    }
  }
  const double pad = 0.05 * (ymax - ymin);
  CHECK(Attr(svg, "data-y-min") == doctest::Approx(ymin - pad));
  CHECK(Attr(svg, "data-y-max") == doctest::Approx(ymax + pad));
  CHECK(Attr(svg, "data-x-min") == doctest::Approx(-0.05));
  CHECK(Attr(svg, "data-x-max") == doctest::Approx(1.05));

  SweepResult one;
  one.rows.resize(1);
  CHECK_THROWS_AS(SvgChart(one), std::invalid_argument);
}

TEST_CASE("write failures name the path") {
  try {
    WriteFile("/nonexistent/dir/out.csv", "x");
    FAIL("expected an I/O error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/out.csv") !=
          std::string::npos);
  }
}

}  // namespace
}  // namespace vflcost::experiment
