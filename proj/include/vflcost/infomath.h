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

// Exact discrete probability tables and information measures.
//
// Tables are dense, indexed by a mixed-radix encoding of the variable
// assignment (the last variable varies fastest) and store natural-log masses.
// Every information quantity is reported in bits.

#ifndef VFLCOST_INFOMATH_H_
#define VFLCOST_INFOMATH_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vflcost::infomath {

// Information in bits (log base 2).
using Bits = double;

// Log-mass of an exact zero.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Slack allowed for negative information values before they are treated as
// an internal-consistency failure. Values in (-kInfoTolerance, 0) clamp to 0.
inline constexpr double kInfoTolerance = 1e-12;

struct VariableSpec {
  std::string name;
  int cardinality = 1;

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

using VarSet = std::vector<std::string>;

// log(sum(exp(values))) without overflow. Empty input gives kLogZero.
double LogSumExp(std::span<const double> values);
double LogAddExp(double a, double b);

// H_b(r) in bits with 0 log 0 = 0. Throws std::domain_error outside [0, 1].
Bits BinaryEntropy(double r);

class ProbTable {
 public:
  // All factories validate: unique names, positive cardinalities, matching
  // size, entries <= 0 (or kLogZero), and total mass 1 within 1e-12.
  static ProbTable FromProbabilities(std::vector<VariableSpec> variables,
                                     std::span<const double> probs);
  static ProbTable FromLogMass(std::vector<VariableSpec> variables,
                               std::vector<double> logmass);
  // Normalizes nonnegative weights given in log space.
  static ProbTable FromLogWeights(std::vector<VariableSpec> variables,
                                  std::vector<double> logweights);

  const std::vector<VariableSpec>& variables() const { return variables_; }
  std::span<const double> logmass() const { return logmass_; }
  std::size_t size() const { return logmass_.size(); }

  bool Has(std::string_view name) const;
  // Position of `name` in variables(); throws std::invalid_argument.
  std::size_t IndexOf(std::string_view name) const;

  std::size_t Encode(std::span<const int> assignment) const;
  void Decode(std::size_t flat, std::span<int> assignment) const;

  double LogProb(std::span<const int> assignment) const;
  double Prob(std::span<const int> assignment) const;

  // Marginal over `targets`, whose order defines the result's variable order.
  ProbTable Marginal(std::span<const std::string> targets) const;

  // For every cell of this table, the flat index of the matching cell in
  // Marginal(targets).
  std::vector<std::size_t> ProjectionIndex(
      std::span<const std::string> targets) const;

 private:
  ProbTable(std::vector<VariableSpec> variables, std::vector<double> logmass);

  std::vector<VariableSpec> variables_;
  std::vector<std::size_t> strides_;
  std::vector<double> logmass_;
};

// Total number of cells spanned by `variables`.
std::size_t CellCount(std::span<const VariableSpec> variables);

Bits Entropy(const ProbTable& table, std::span<const std::string> targets);

// H(targets | given). Throws std::invalid_argument if the sets overlap.
Bits ConditionalEntropy(const ProbTable& table,
                        std::span<const std::string> targets,
                        std::span<const std::string> given);

Bits MutualInformation(const ProbTable& table, std::span<const std::string> a,
                       std::span<const std::string> b);

// I(a; b | given). The three sets must be pairwise disjoint.
Bits ConditionalMutualInformation(const ProbTable& table,
                                  std::span<const std::string> a,
                                  std::span<const std::string> b,
                                  std::span<const std::string> given);

}  // namespace vflcost::infomath

#endif  // VFLCOST_INFOMATH_H_
