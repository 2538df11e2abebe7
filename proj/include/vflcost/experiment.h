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

// Experiment runner behind the command-line tool: configuration, the
// r-sweep (no privacy), the epsilon-sweep (xor mechanism), the cost table,
// and CSV / SVG output.

#ifndef VFLCOST_EXPERIMENT_H_
#define VFLCOST_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vflcost/bayes_model.h"
#include "vflcost/infomath.h"
#include "vflcost/schemes.h"

namespace vflcost::experiment {

using infomath::Bits;

enum class Experiment { kSweepR, kSweepEps, kCostTable, kLoss, kPrivacyAudit };
enum class Backend { kConjugate, kQuadrature };

std::string_view ExperimentName(Experiment e);  // "sweep_r", ...
Experiment ParseExperiment(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::kSweepR;

  // [model]
  int agents = 2;
  double r = 0.5;
  int r_points = 41;  // sweep_r grid over [0, 1]
  bayes::BetaHyper hyper;

  // [run]
  int n = 3;
  Backend backend = Backend::kConjugate;
  int quadrature_nodes = 256;
  int workers = 0;  // 0: hardware concurrency
  std::uint64_t max_terms = 10'000'000;

  // [privacy]
  double eps_min = 0.0;
  double eps_max = 1.0;
  int eps_steps = 41;
  double epsilon = std::numeric_limits<double>::infinity();  // loss, audit
  double s = 0.0;                                             // audit

  // [output]
  std::string csv_path;
  std::string svg_path;

  // Defaults for an experiment: two agents for sweep_r and cost_table,
  // three for sweep_eps.
  static ExperimentConfig Defaults(Experiment e);

  // Throws ConfigError.
  void Validate() const;

  std::vector<double> RGrid() const;
  std::vector<double> EpsilonGrid() const;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

// Sectioned key = value text ("[model]", "[run]", "[privacy]", "[output]").
// Keys absent from the text keep the defaults of `base`.
ExperimentConfig ParseConfig(std::string_view text,
                             const ExperimentConfig& base = {});
ExperimentConfig LoadConfig(const std::string& path,
                            const ExperimentConfig& base = {});
std::string SerializeConfig(const ExperimentConfig& config);

std::unique_ptr<bayes::ParameterIntegrator> MakeIntegrator(
    const ExperimentConfig& config, double r);

struct SweepRow {
  double sweep_value = 0.0;
  std::array<Bits, 4> losses{};  // indexed by SchemeSpec::index()
  std::optional<double> mechanism_s;
};

struct SweepResult {
  std::string sweep_label;  // axis label of the swept quantity
  bool has_mechanism = false;
  std::vector<SweepRow> rows;
};

// Losses at epsilon = infinity against I(X1; X2) = 1 - H_b(r). Both r and
// 1 - r are evaluated per abscissa and must agree within 1e-9.
SweepResult RunSweepR(const ExperimentConfig& config);

// Private losses under the xor mechanism against epsilon.
SweepResult RunSweepEps(const ExperimentConfig& config);

// Single-point losses at config.epsilon (identity channel when infinite).
SweepResult RunLoss(const ExperimentConfig& config);

struct CostCell {
  schemes::SchemeSpec a;
  schemes::SchemeSpec b;
  Bits loss_difference = 0.0;
  Bits cmi = 0.0;
  Bits gap = 0.0;
};

struct CostTable {
  // cost[a][b] = R^a - R^b where the ordering of a over b is guaranteed;
  // empty for the unordered CL/DI, DL/CI pair and below the diagonal.
  std::array<std::array<std::optional<Bits>, 4>, 4> cost;
  std::vector<CostCell> cells;
};

// Throws ConfigError when the per-agent losses differ by more than 1e-9.
CostTable RunCostTable(const ExperimentConfig& config);

struct AuditReport {
  double s = 0.0;
  Bits epsilon = 0.0;
  std::vector<Bits> per_agent_cmi;
  std::vector<std::optional<Bits>> closed_form;  // three-agent model only
  bool feasible = false;
  double least_noise_s = 0.0;
};

AuditReport RunPrivacyAudit(const ExperimentConfig& config);

// Number format used by every CSV writer: 12 significant digits.
std::string FormatValue(double v);

std::string SweepCsv(const SweepResult& result);
std::string CostTableCsv(const CostTable& table);
std::string AuditCsv(const AuditReport& report);
SweepResult ParseSweepCsv(std::string_view text);

std::string SvgChart(const SweepResult& result);

// Throws IoError naming the path.
void WriteFile(const std::string& path, const std::string& contents);
void EmitCsv(const SweepResult& result, const std::string& path);
void EmitSvgChart(const SweepResult& result, const std::string& path);

}  // namespace vflcost::experiment

#endif  // VFLCOST_EXPERIMENT_H_
