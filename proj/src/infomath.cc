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

#include "vflcost/infomath.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "vflcost/errors.h"

namespace vflcost::infomath {
namespace {

constexpr double kNormTolerance = 1e-12;

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

VarSet Concat(std::initializer_list<std::span<const std::string>> parts) {
  VarSet out;
  for (auto part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

void RequireDisjoint(std::span<const std::string> a,
                     std::span<const std::string> b) {
  for (const auto& name : a) {
    if (std::find(b.begin(), b.end(), name) != b.end()) {
      throw std::invalid_argument("variable sets overlap on '" + name + "'");
    }
  }
}

// Sum of p * log-ratio in bits; `terms` receives (log p, log ratio) pairs.
template <typename Fn>
double SumOverCells(const ProbTable& joint, Fn&& log_ratio) {
  CompensatedSum acc;
  const auto lm = joint.logmass();
  for (std::size_t i = 0; i < lm.size(); ++i) {
    if (lm[i] == kLogZero) continue;
    acc.Add(std::exp(lm[i]) * log_ratio(i));
  }
  return acc.value() / std::numbers::ln2;
}

// Checks the direct evaluation against the chain-rule evaluation and clamps
// rounding noise at zero.
Bits Settle(double direct, double chained, double scale, const char* what) {
  const double tol = kInfoTolerance * (1.0 + std::abs(scale));
  if (!(std::abs(direct - chained) <= tol)) {
    throw NumericalError(std::string(what) +
                         ": chain-rule identity violated (direct=" +
                         std::to_string(direct) +
                         ", chained=" + std::to_string(chained) + ")");
  }
  if (direct < 0.0) {
    if (direct < -tol) {
      throw NumericalError(std::string(what) + " is negative: " +
                           std::to_string(direct));
    }
    return 0.0;
  }
  return direct;
}

}  // namespace

double LogSumExp(std::span<const double> values) {
  if (values.empty()) return kLogZero;
  const double max = *std::max_element(values.begin(), values.end());
  if (max == kLogZero || std::isinf(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double LogAddExp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

Bits BinaryEntropy(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::domain_error("binary entropy argument outside [0, 1]: " +
                            std::to_string(r));
  }
  double h = 0.0;
  if (r > 0.0) h -= r * std::log2(r);
  if (r < 1.0) h -= (1.0 - r) * std::log2(1.0 - r);
  return h;
}

std::size_t CellCount(std::span<const VariableSpec> variables) {
  std::size_t n = 1;
  for (const auto& v : variables) n *= static_cast<std::size_t>(v.cardinality);
  return n;
}

ProbTable::ProbTable(std::vector<VariableSpec> variables,
                     std::vector<double> logmass)
    : variables_(std::move(variables)), logmass_(std::move(logmass)) {
  std::unordered_set<std::string> seen;
  for (const auto& v : variables_) {
    if (v.cardinality < 1) {
      throw std::invalid_argument("variable '" + v.name +
                                  "' has nonpositive cardinality");
    }
    if (!seen.insert(v.name).second) {
      throw std::invalid_argument("duplicate variable name '" + v.name + "'");
    }
  }
  if (CellCount(variables_) != logmass_.size()) {
    throw std::invalid_argument("table size does not match variable alphabets");
  }
  strides_.assign(variables_.size(), 1);
  for (std::size_t i = variables_.size(); i-- > 1;) {
    strides_[i - 1] =
        strides_[i] * static_cast<std::size_t>(variables_[i].cardinality);
  }
  for (double l : logmass_) {
    if (std::isnan(l) || l > 0.0) {
      throw std::invalid_argument("log-mass entry must be <= 0");
    }
  }
  const double total = std::exp(LogSumExp(logmass_));
  if (!(std::abs(total - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("table is not normalized (total mass " +
                                std::to_string(total) + ")");
  }
}

ProbTable ProbTable::FromProbabilities(std::vector<VariableSpec> variables,
                                       std::span<const double> probs) {
  std::vector<double> logmass(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) {
      throw std::invalid_argument("negative or NaN probability");
    }
    logmass[i] = probs[i] > 0.0 ? std::log(probs[i]) : kLogZero;
  }
  return ProbTable(std::move(variables), std::move(logmass));
}

ProbTable ProbTable::FromLogMass(std::vector<VariableSpec> variables,
                                 std::vector<double> logmass) {
  return ProbTable(std::move(variables), std::move(logmass));
}

ProbTable ProbTable::FromLogWeights(std::vector<VariableSpec> variables,
                                    std::vector<double> logweights) {
  const double total = LogSumExp(logweights);
  if (total == kLogZero || std::isinf(total) || std::isnan(total)) {
    throw std::invalid_argument("weights have no finite positive mass");
  }
  for (double& l : logweights) {
    if (l != kLogZero) l = std::min(0.0, l - total);
  }
  return ProbTable(std::move(variables), std::move(logweights));
}

bool ProbTable::Has(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const VariableSpec& v) { return v.name == name; });
}

std::size_t ProbTable::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

std::size_t ProbTable::Encode(std::span<const int> assignment) const {
  if (assignment.size() != variables_.size()) {
    throw std::invalid_argument("assignment arity mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] < 0 || assignment[i] >= variables_[i].cardinality) {
      throw std::out_of_range("assignment value out of range for '" +
                              variables_[i].name + "'");
    }
    flat += static_cast<std::size_t>(assignment[i]) * strides_[i];
  }
  return flat;
}

void ProbTable::Decode(std::size_t flat, std::span<int> assignment) const {
  if (assignment.size() != variables_.size()) {
    throw std::invalid_argument("assignment arity mismatch");
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    assignment[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
}

double ProbTable::LogProb(std::span<const int> assignment) const {
  return logmass_[Encode(assignment)];
}

double ProbTable::Prob(std::span<const int> assignment) const {
  return std::exp(LogProb(assignment));
}

std::vector<std::size_t> ProbTable::ProjectionIndex(
    std::span<const std::string> targets) const {
  // Stride of every source variable inside the target encoding (0 if the
  // variable is summed out).
  std::vector<std::size_t> target_stride(variables_.size(), 0);
  std::size_t stride = 1;
  for (std::size_t t = targets.size(); t-- > 0;) {
    const std::size_t pos = IndexOf(targets[t]);
    if (target_stride[pos] != 0) {
      throw std::invalid_argument("duplicate target '" + targets[t] + "'");
    }
    target_stride[pos] = stride;
    stride *= static_cast<std::size_t>(variables_[pos].cardinality);
  }

  std::vector<std::size_t> out(logmass_.size());
  std::vector<int> digit(variables_.size(), 0);
  std::size_t index = 0;
  for (std::size_t cell = 0; cell < logmass_.size(); ++cell) {
    out[cell] = index;
    // Odometer increment, last variable fastest.
    for (std::size_t v = variables_.size(); v-- > 0;) {
      if (++digit[v] < variables_[v].cardinality) {
        index += target_stride[v];
        break;
      }
      index -= target_stride[v] * static_cast<std::size_t>(digit[v] - 1);
      digit[v] = 0;
    }
  }
  return out;
}

ProbTable ProbTable::Marginal(std::span<const std::string> targets) const {
  std::vector<VariableSpec> vars;
  vars.reserve(targets.size());
  for (const auto& name : targets) vars.push_back(variables_[IndexOf(name)]);
  const auto index = ProjectionIndex(targets);

  std::vector<double> max(CellCount(vars), kLogZero);
  for (std::size_t i = 0; i < logmass_.size(); ++i) {
    max[index[i]] = std::max(max[index[i]], logmass_[i]);
  }
  std::vector<double> sum(max.size(), 0.0);
  for (std::size_t i = 0; i < logmass_.size(); ++i) {
    if (logmass_[i] == kLogZero) continue;
    sum[index[i]] += std::exp(logmass_[i] - max[index[i]]);
  }
  std::vector<double> out(max.size(), kLogZero);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (max[j] != kLogZero) out[j] = std::min(0.0, max[j] + std::log(sum[j]));
  }
  return ProbTable(std::move(vars), std::move(out));
}

Bits Entropy(const ProbTable& table, std::span<const std::string> targets) {
  const ProbTable m = table.Marginal(targets);
  const auto lm = m.logmass();
  const double h = -SumOverCells(m, [&](std::size_t i) { return lm[i]; });
  return Settle(h, h, h, "entropy");
}

Bits ConditionalEntropy(const ProbTable& table,
                        std::span<const std::string> targets,
                        std::span<const std::string> given) {
  RequireDisjoint(targets, given);
  const VarSet all = Concat({targets, given});
  const ProbTable joint = table.Marginal(all);
  const ProbTable cond = joint.Marginal(given);
  const auto to_given = joint.ProjectionIndex(given);
  const auto lj = joint.logmass();
  const auto lg = cond.logmass();
  const double direct = SumOverCells(
      joint, [&](std::size_t i) { return lg[to_given[i]] - lj[i]; });
  const double h_joint = Entropy(joint, all);
  const double chained = h_joint - Entropy(cond, given);
  return Settle(direct, chained, h_joint, "conditional entropy");
}

Bits MutualInformation(const ProbTable& table, std::span<const std::string> a,
                       std::span<const std::string> b) {
  RequireDisjoint(a, b);
  const VarSet all = Concat({a, b});
  const ProbTable joint = table.Marginal(all);
  const ProbTable ma = joint.Marginal(a);
  const ProbTable mb = joint.Marginal(b);
  const auto ia = joint.ProjectionIndex(a);
  const auto ib = joint.ProjectionIndex(b);
  const auto lj = joint.logmass();
  const auto la = ma.logmass();
  const auto lb = mb.logmass();
  const double direct = SumOverCells(joint, [&](std::size_t i) {
    return lj[i] - la[ia[i]] - lb[ib[i]];
  });
  const double h_a = Entropy(ma, a);
  const double chained = h_a - ConditionalEntropy(joint, a, b);
  return Settle(direct, chained, h_a, "mutual information");
}

Bits ConditionalMutualInformation(const ProbTable& table,
                                  std::span<const std::string> a,
                                  std::span<const std::string> b,
                                  std::span<const std::string> given) {
  RequireDisjoint(a, b);
  RequireDisjoint(a, given);
  RequireDisjoint(b, given);
  const VarSet all = Concat({a, b, given});
  const VarSet ac = Concat({a, given});
  const VarSet bc = Concat({b, given});
  const ProbTable joint = table.Marginal(all);
  const ProbTable m_ac = joint.Marginal(ac);
  const ProbTable m_bc = joint.Marginal(bc);
  const ProbTable m_c = joint.Marginal(given);
  const auto i_ac = joint.ProjectionIndex(ac);
  const auto i_bc = joint.ProjectionIndex(bc);
  const auto i_c = joint.ProjectionIndex(given);
  const auto lj = joint.logmass();
  const auto l_ac = m_ac.logmass();
  const auto l_bc = m_bc.logmass();
  const auto l_c = m_c.logmass();
  const double direct = SumOverCells(joint, [&](std::size_t i) {
    return lj[i] + l_c[i_c[i]] - l_ac[i_ac[i]] - l_bc[i_bc[i]];
  });
  const double h_a_c = ConditionalEntropy(joint, a, given);
  const double chained = h_a_c - ConditionalEntropy(joint, a, bc);
  return Settle(direct, chained, h_a_c, "conditional mutual information");
}

}  // namespace vflcost::infomath
