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

// Epsilon-private predictive loss: the worst-case scheme loss minimized over
// the mechanisms of a family that satisfy the leakage budget.

#ifndef VFLCOST_OPTIMIZER_H_
#define VFLCOST_OPTIMIZER_H_

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "vflcost/bayes_model.h"
#include "vflcost/privacy.h"
#include "vflcost/schemes.h"

namespace vflcost::optimizer {

using infomath::Bits;
using privacy::AggregationChannel;
using schemes::EngineOptions;
using schemes::LossReport;
using schemes::SchemeSpec;

// The continuum s in [0, 1/2] of xor mechanisms over `agents` binary inputs.
struct XorNoise {
  int agents = 3;
};

// An explicit finite list of mechanisms.
struct ChannelList {
  std::vector<AggregationChannel> members;
};

struct MechanismFamily {
  std::variant<XorNoise, ChannelList> kind;
  // For xor families: confirm on the s-grid {0, 0.01, ..., 0.5} that no
  // feasible grid point beats the least-noise mechanism.
  bool verify_optimality = true;

  static MechanismFamily Xor(int agents) { return {XorNoise{agents}, true}; }
  static MechanismFamily List(std::vector<AggregationChannel> members) {
    return {ChannelList{std::move(members)}, true};
  }
};

struct ChosenMechanism {
  std::optional<double> s;                 // xor family
  std::optional<std::size_t> list_index;   // explicit list
  std::optional<AggregationChannel> channel;
};

struct PrivateLoss {
  Bits loss = 0.0;
  LossReport report;
  // Empty for DL/DI, which never uses the shared feature.
  ChosenMechanism mechanism;
  // Set when the s-grid check found a better feasible mechanism than the
  // least-noise one; the grid minimizer is then returned instead.
  bool grid_fallback = false;
};

// Solves many (scheme, epsilon) points for one model and family, memoizing
// audits and grid losses. Not thread-safe.
class PrivateLossSolver {
 public:
  PrivateLossSolver(const bayes::ParameterIntegrator& model,
                    MechanismFamily family, int n,
                    EngineOptions options = {});

  PrivateLoss Solve(const SchemeSpec& scheme, Bits epsilon);

 private:
  PrivateLoss SolveXor(const SchemeSpec& scheme, Bits epsilon, int agents);
  PrivateLoss SolveList(const SchemeSpec& scheme, Bits epsilon,
                        const ChannelList& list);
  const LossReport& GridLoss(const SchemeSpec& scheme, int step);
  bool GridFeasible(int step, Bits epsilon);
  const LossReport& ListLoss(const SchemeSpec& scheme, std::size_t member);

  const bayes::ParameterIntegrator& model_;
  MechanismFamily family_;
  int n_;
  EngineOptions options_;
  infomath::ProbTable feature_marginal_;
  std::map<std::pair<std::size_t, int>, LossReport> grid_losses_;
  std::map<int, Bits> grid_leakage_;
  std::map<std::pair<std::size_t, std::size_t>, LossReport> list_losses_;
  std::vector<privacy::PrivacyAudit> list_audits_;
};

PrivateLoss ComputePrivateLoss(const bayes::ParameterIntegrator& model,
                               const SchemeSpec& scheme,
                               const MechanismFamily& family, Bits epsilon,
                               int n, const EngineOptions& options = {});

struct PrivateLossCurve {
  std::vector<Bits> epsilons;
  std::vector<SchemeSpec> schemes;
  // [scheme][epsilon]
  std::vector<std::vector<PrivateLoss>> points;
};

// `epsilons` must be sorted ascending.
PrivateLossCurve ComputePrivateLossCurve(
    const bayes::ParameterIntegrator& model,
    const std::vector<SchemeSpec>& schemes, const MechanismFamily& family,
    const std::vector<Bits>& epsilons, int n,
    const EngineOptions& options = {});

}  // namespace vflcost::optimizer

#endif  // VFLCOST_OPTIMIZER_H_
