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

// Aggregation mechanisms and the per-agent leakage constraint
// I(Xhat; X_k | X_{-k}) <= epsilon.

#ifndef VFLCOST_PRIVACY_H_
#define VFLCOST_PRIVACY_H_

#include <cstddef>
#include <span>
#include <vector>

#include "vflcost/infomath.h"

namespace vflcost::privacy {

using infomath::Bits;
using infomath::ProbTable;
using infomath::VariableSpec;

// Stochastic map P(Xhat | X_1..X_K) over finite alphabets. Rows are indexed
// by the mixed-radix encoding of the input assignment.
class AggregationChannel {
 public:
  // `log_kernel` holds one log-distribution over the output alphabet per
  // input cell; every row must be normalized within 1e-12.
  AggregationChannel(std::vector<VariableSpec> inputs, VariableSpec output,
                     std::vector<double> log_kernel);

  const std::vector<VariableSpec>& inputs() const { return inputs_; }
  const VariableSpec& output() const { return output_; }
  std::size_t input_cells() const { return rows_; }

  std::span<const double> LogRow(std::size_t input_cell) const;
  double Prob(std::size_t input_cell, int out) const;

 private:
  std::vector<VariableSpec> inputs_;
  VariableSpec output_;
  std::size_t rows_ = 0;
  std::vector<double> log_kernel_;
};

// Xhat = X_1 xor ... xor X_K xor xi with xi ~ Bern(s), binary inputs.
struct XorNoiseFamily {
  int agents = 3;
  double s = 0.0;
};

struct PrivacyAudit {
  std::vector<Bits> per_agent_cmi;
  Bits epsilon = 0.0;
  bool feasible = false;

  Bits max_cmi() const;
};

AggregationChannel ChannelFromXorFamily(const XorNoiseFamily& family);

// Deterministic copy of the whole feature vector; the output alphabet is the
// product of the input alphabets.
AggregationChannel IdentityChannel(const std::vector<VariableSpec>& features);

// Joint table over (features..., Xhat).
ProbTable JointWithChannel(const ProbTable& feature_marginal,
                           const AggregationChannel& channel);

// Evaluates I(Xhat; X_k | X_{-k}) for every agent under `feature_marginal`,
// whose variables must equal the channel inputs. `epsilon` may be +inf.
PrivacyAudit AuditPrivacy(const AggregationChannel& channel,
                          const ProbTable& feature_marginal, Bits epsilon);

// Closed-form leakage of the three-agent xor mechanism for agent 1, 2 or 3,
// where X_1, X_2 agree with probability r and X_3 copies X_2 with
// probability r.
Bits ClosedFormCmiThreeAgent(double s, double r, int agent);

// Least-noise s in [0, 1/2] meeting epsilon for all three agents, from the
// closed forms.
double MaxInformativeS(Bits epsilon, double r);

// Same search for a K-agent xor mechanism, driven by AuditPrivacy on an
// arbitrary binary feature marginal.
double LeastNoiseXorS(const ProbTable& feature_marginal, Bits epsilon);

}  // namespace vflcost::privacy

#endif  // VFLCOST_PRIVACY_H_
