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

// Exact predictive losses of the four collaboration schemes.
//
// A scheme's loss for agent k is H(Y | test view, N training samples of the
// training view), with the predictor taken to be the exact posterior
// predictive. The N i.i.d. samples are summarized by their count vector over
// the per-sample training alphabet, weighted by its multinomial coefficient.

#ifndef VFLCOST_SCHEMES_H_
#define VFLCOST_SCHEMES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vflcost/bayes_model.h"
#include "vflcost/infomath.h"
#include "vflcost/privacy.h"

namespace vflcost::schemes {

using bayes::ParameterIntegrator;
using infomath::Bits;
using infomath::ProbTable;
using infomath::VarSet;
using privacy::AggregationChannel;

enum class Phase { kCollaborative, kDecentralized };

struct SchemeSpec {
  Phase learning = Phase::kDecentralized;
  Phase inference = Phase::kDecentralized;

  bool collaborative_learning() const {
    return learning == Phase::kCollaborative;
  }
  bool collaborative_inference() const {
    return inference == Phase::kCollaborative;
  }
  bool any_collaboration() const {
    return collaborative_learning() || collaborative_inference();
  }
  // "CL/CI", "CL/DI", "DL/CI" or "DL/DI".
  std::string_view name() const;
  // Position in kAllSchemes.
  std::size_t index() const;

  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

inline constexpr SchemeSpec kClCi{Phase::kCollaborative, Phase::kCollaborative};
inline constexpr SchemeSpec kClDi{Phase::kCollaborative, Phase::kDecentralized};
inline constexpr SchemeSpec kDlCi{Phase::kDecentralized, Phase::kCollaborative};
inline constexpr SchemeSpec kDlDi{Phase::kDecentralized, Phase::kDecentralized};
inline constexpr std::array<SchemeSpec, 4> kAllSchemes = {kClCi, kClDi, kDlCi,
                                                          kDlDi};

// Parses "CL/CI" etc.; throws std::invalid_argument.
SchemeSpec ParseScheme(std::string_view name);

// What agent k observes: per training sample and at test time.
struct SchemeView {
  VarSet train_visible;  // X_k, Xhat (collaborative learning), Y
  VarSet test_visible;   // X_k, Xhat (collaborative inference)
  int agent = 1;
};

SchemeView MakeView(const SchemeSpec& scheme, int agent);

struct LossReport {
  std::vector<Bits> per_agent_loss;
  Bits worst_case = 0.0;
};

// Worst-case losses indexed by SchemeSpec::index().
using SchemeLosses = std::array<Bits, 4>;

struct EngineOptions {
  // Cap on (count vectors) x (test cells) per view.
  std::uint64_t max_terms = 10'000'000;
};

// Number of count vectors of total n over `symbols` categories.
std::uint64_t CountVectorSpaceSize(int symbols, int n);

// All count vectors of total n over `symbols` categories, in lexicographic
// order (first category most significant, descending).
std::vector<std::vector<int>> EnumerateCountVectors(int symbols, int n);

double LogMultinomial(std::span<const int> counts);

// Name of the dataset variable in DatasetJoint tables.
inline constexpr char kDatasetName[] = "D";

// Joint table over (D, test variables..., Y) where D indexes count vectors
// of N samples from the training view.
ProbTable DatasetJoint(const ParameterIntegrator& model,
                       const AggregationChannel* channel, const VarSet& train,
                       const VarSet& test, int n,
                       const EngineOptions& options = {});

// H(Y | test view, training view^N) in bits for one agent. Collaborative
// schemes require a channel; DL/DI ignores any channel given.
Bits SchemeLoss(const ParameterIntegrator& model, const SchemeSpec& scheme,
                int agent, int n, const AggregationChannel* channel,
                const EngineOptions& options = {});

LossReport ComputeLossReport(const ParameterIntegrator& model,
                             const SchemeSpec& scheme, int n,
                             const AggregationChannel* channel,
                             const EngineOptions& options = {});

// All four schemes with the identity channel (collaboration reveals X).
std::array<LossReport, 4> NonprivateLosses(const ParameterIntegrator& model,
                                           int n,
                                           const EngineOptions& options = {});

SchemeLosses WorstCase(const std::array<LossReport, 4>& reports);

// R^a - R^b, clamped at zero. Throws NumericalError if R^a < R^b - 1e-12.
Bits Cost(const SchemeSpec& a, const SchemeSpec& b,
          const SchemeLosses& losses);

// Whether (a, b) is one of the five populated cost cells with a closed
// conditional-mutual-information characterization.
bool IsOrderedCostCell(const SchemeSpec& a, const SchemeSpec& b);

// The conditional mutual information characterizing the cost of a over b at
// epsilon = infinity, evaluated directly on the joint of the label, the
// test features and both the agent-local and full training statistics.
Bits CostCellCmi(const ParameterIntegrator& model, const SchemeSpec& a,
                 const SchemeSpec& b, int agent, int n,
                 const EngineOptions& options = {});

}  // namespace vflcost::schemes

#endif  // VFLCOST_SCHEMES_H_
