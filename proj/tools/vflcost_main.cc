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

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "vflcost/errors.h"
#include "vflcost/experiment.h"

namespace {

namespace ex = vflcost::experiment;

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct Overrides {
  std::string config_path;
  std::string out;
  std::string svg;
  std::optional<int> workers;
  std::optional<int> quadrature_nodes;
  std::optional<std::string> backend;
  std::optional<int> agents;
  std::optional<int> n;
  std::optional<double> r;
  std::optional<int> r_points;
  std::optional<double> eps_min;
  std::optional<double> eps_max;
  std::optional<int> eps_steps;
  std::optional<double> epsilon;
  std::optional<double> s;
};

void AddCommonFlags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Sectioned key = value file");
  cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
  cmd->add_option("--svg", o.svg, "SVG chart output path");
  cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  cmd->add_option("--quadrature-nodes", o.quadrature_nodes,
                  "Gauss-Legendre nodes per axis");
  cmd->add_option("--backend", o.backend, "conjugate or quadrature");
  cmd->add_option("--agents", o.agents, "Number of agents K");
  cmd->add_option("--N", o.n, "Training set size");
  cmd->add_option("--r", o.r, "Feature coupling r");
  cmd->add_option("--r-points", o.r_points, "Points of the r grid");
  cmd->add_option("--eps-min", o.eps_min, "Smallest epsilon of the grid");
  cmd->add_option("--eps-max", o.eps_max, "Largest epsilon of the grid");
  cmd->add_option("--eps-steps", o.eps_steps, "Points of the epsilon grid");
  cmd->add_option("--epsilon", o.epsilon, "Privacy budget in bits");
  cmd->add_option("--s", o.s, "Noise level of the xor mechanism");
}

ex::ExperimentConfig Resolve(ex::Experiment e, const Overrides& o) {
  auto config = ex::ExperimentConfig::Defaults(e);
  if (!o.config_path.empty()) config = ex::LoadConfig(o.config_path, config);
  config.experiment = e;
  if (!o.out.empty()) config.csv_path = o.out;
  if (!o.svg.empty()) config.svg_path = o.svg;
  if (o.workers) config.workers = *o.workers;
  if (o.quadrature_nodes) config.quadrature_nodes = *o.quadrature_nodes;
  if (o.backend) {
    if (*o.backend == "conjugate") {
      config.backend = ex::Backend::kConjugate;
    } else if (*o.backend == "quadrature") {
      config.backend = ex::Backend::kQuadrature;
    } else {
      throw vflcost::ConfigError("backend must be 'conjugate' or 'quadrature'");
    }
  }
  if (o.agents) config.agents = *o.agents;
  if (o.n) config.n = *o.n;
  if (o.r) config.r = *o.r;
  if (o.r_points) config.r_points = *o.r_points;
  if (o.eps_min) config.eps_min = *o.eps_min;
  if (o.eps_max) config.eps_max = *o.eps_max;
  if (o.eps_steps) config.eps_steps = *o.eps_steps;
  if (o.epsilon) config.epsilon = *o.epsilon;
  if (o.s) config.s = *o.s;
  config.Validate();
  return config;
}

void Output(const ex::ExperimentConfig& config, const std::string& csv) {
  if (config.csv_path.empty()) {
    std::cout << csv;
  } else {
    ex::WriteFile(config.csv_path, csv);
  }
}

int Run(ex::Experiment e, const Overrides& o) {
  const auto config = Resolve(e, o);
  switch (e) {
    case ex::Experiment::kSweepR:
    case ex::Experiment::kSweepEps:
    case ex::Experiment::kLoss: {
      const auto result = e == ex::Experiment::kSweepR    ? ex::RunSweepR(config)
                          : e == ex::Experiment::kSweepEps ? ex::RunSweepEps(config)
                                                           : ex::RunLoss(config);
      Output(config, ex::SweepCsv(result));
      if (!config.svg_path.empty()) {
        if (result.rows.size() < 2) {
          throw vflcost::ConfigError("a chart needs at least two sweep rows");
        }
        ex::EmitSvgChart(result, config.svg_path);
      }
      break;
    }
    case ex::Experiment::kCostTable:
      Output(config, ex::CostTableCsv(ex::RunCostTable(config)));
      break;
    case ex::Experiment::kPrivacyAudit:
      Output(config, ex::AuditCsv(ex::RunPrivacyAudit(config)));
      break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact predictive losses of vertical federated learning schemes"};
  app.require_subcommand(1);
  Overrides overrides;
  std::optional<ex::Experiment> chosen;
  const std::pair<const char*, ex::Experiment> commands[] = {
      {"sweep-r", ex::Experiment::kSweepR},
      {"sweep-eps", ex::Experiment::kSweepEps},
      {"cost-table", ex::Experiment::kCostTable},
      {"loss", ex::Experiment::kLoss},
      {"privacy-audit", ex::Experiment::kPrivacyAudit},
  };
  const char* help[] = {
      "Nonprivate losses against I(X1;X2), two agents",
      "Private losses against epsilon, xor mechanism",
      "Costs of decentralization and matching conditional MIs",
      "Four losses at one (r, epsilon)",
      "Leakage of the xor mechanism at noise level s",
  };
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* cmd = app.add_subcommand(commands[i].first, help[i]);
    AddCommonFlags(cmd, overrides);
    const auto e = commands[i].second;
    cmd->callback([&chosen, e] { chosen = e; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  try {
    return Run(*chosen, overrides);
  } catch (const vflcost::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const vflcost::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
