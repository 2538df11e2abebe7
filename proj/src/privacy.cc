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

#include "vflcost/privacy.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vflcost/variables.h"

namespace vflcost::privacy {
namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kBracketWidth = 1e-12;

double Clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Smallest s in [0, 1/2] with leakage(s) <= epsilon. Requires leakage to be
// nonincreasing on [0, 1/2] and zero at 1/2.
template <typename Leakage>
double SmallestFeasibleNoise(Leakage&& leakage, Bits epsilon) {
  if (std::isnan(epsilon) || epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
  const auto feasible = [&](double s) {
    return leakage(s) <= epsilon + infomath::kInfoTolerance;
  };
  if (feasible(0.0)) return 0.0;
  // The xor leakage H_b(p * s) - H_b(s) is strictly positive for s < 1/2
  // whenever it is positive at s = 0, so only the uninformative mechanism
  // meets a zero budget.
  if (epsilon == 0.0) return 0.5;
  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > kBracketWidth) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

AggregationChannel::AggregationChannel(std::vector<VariableSpec> inputs,
                                       VariableSpec output,
                                       std::vector<double> log_kernel)
    : inputs_(std::move(inputs)),
      output_(std::move(output)),
      rows_(infomath::CellCount(inputs_)),
      log_kernel_(std::move(log_kernel)) {
  if (output_.cardinality < 1) {
    throw std::invalid_argument("channel output alphabet is empty");
  }
  for (const auto& in : inputs_) {
    if (in.name == output_.name) {
      throw std::invalid_argument("channel output name clashes with input '" +
                                  in.name + "'");
    }
  }
  if (log_kernel_.size() != rows_ * output_.cardinality) {
    throw std::invalid_argument("channel kernel has wrong size");
  }
  for (std::size_t row = 0; row < rows_; ++row) {
    const auto lr = LogRow(row);
    if (std::any_of(lr.begin(), lr.end(),
                    [](double l) { return std::isnan(l) || l > 0.0; })) {
      throw std::invalid_argument("channel log-probability must be <= 0");
    }
    const double total = std::exp(infomath::LogSumExp(lr));
    if (!(std::abs(total - 1.0) <= kRowTolerance)) {
      throw std::invalid_argument("channel row " + std::to_string(row) +
                                  " is not normalized");
    }
  }
}

std::span<const double> AggregationChannel::LogRow(
    std::size_t input_cell) const {
  const auto width = static_cast<std::size_t>(output_.cardinality);
  return std::span<const double>(log_kernel_).subspan(input_cell * width,
                                                      width);
}

double AggregationChannel::Prob(std::size_t input_cell, int out) const {
  return std::exp(LogRow(input_cell)[static_cast<std::size_t>(out)]);
}

Bits PrivacyAudit::max_cmi() const {
  return per_agent_cmi.empty()
             ? 0.0
             : *std::max_element(per_agent_cmi.begin(), per_agent_cmi.end());
}

AggregationChannel ChannelFromXorFamily(const XorNoiseFamily& family) {
  if (family.agents < 2) {
    throw std::invalid_argument("xor mechanism needs at least two agents");
  }
  if (!(family.s >= 0.0 && family.s <= 1.0)) {
    throw std::invalid_argument("xor noise probability outside [0, 1]");
  }
  auto inputs = BinaryFeatures(family.agents);
  const std::size_t rows = infomath::CellCount(inputs);
  const double log_keep =
      family.s < 1.0 ? std::log1p(-family.s) : infomath::kLogZero;
  const double log_flip =
      family.s > 0.0 ? std::log(family.s) : infomath::kLogZero;
  std::vector<double> kernel(rows * 2);
  for (std::size_t x = 0; x < rows; ++x) {
    const int parity = std::popcount(x) & 1;
    kernel[2 * x + parity] = log_keep;
    kernel[2 * x + (1 - parity)] = log_flip;
  }
  return AggregationChannel(std::move(inputs), {kSharedName, 2},
                            std::move(kernel));
}

AggregationChannel IdentityChannel(const std::vector<VariableSpec>& features) {
  const std::size_t rows = infomath::CellCount(features);
  std::vector<double> kernel(rows * rows, infomath::kLogZero);
  for (std::size_t x = 0; x < rows; ++x) kernel[x * rows + x] = 0.0;
  return AggregationChannel(features, {kSharedName, static_cast<int>(rows)},
                            std::move(kernel));
}

ProbTable JointWithChannel(const ProbTable& feature_marginal,
                           const AggregationChannel& channel) {
  if (feature_marginal.variables() != channel.inputs()) {
    throw std::invalid_argument(
        "feature marginal does not match the channel inputs");
  }
  auto vars = channel.inputs();
  vars.push_back(channel.output());
  const auto width = static_cast<std::size_t>(channel.output().cardinality);
  const auto lf = feature_marginal.logmass();
  std::vector<double> logmass(lf.size() * width);
  for (std::size_t x = 0; x < lf.size(); ++x) {
    const auto row = channel.LogRow(x);
    for (std::size_t o = 0; o < width; ++o) {
      logmass[x * width + o] = (lf[x] == infomath::kLogZero)
                                   ? infomath::kLogZero
                                   : lf[x] + row[o];
    }
  }
  return ProbTable::FromLogMass(std::move(vars), std::move(logmass));
}

PrivacyAudit AuditPrivacy(const AggregationChannel& channel,
                          const ProbTable& feature_marginal, Bits epsilon) {
  if (std::isnan(epsilon) || epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
  const ProbTable joint = JointWithChannel(feature_marginal, channel);
  const std::vector<std::string> shared = {channel.output().name};
  PrivacyAudit audit;
  audit.epsilon = epsilon;
  for (const auto& target : channel.inputs()) {
    std::vector<std::string> others;
    for (const auto& v : channel.inputs()) {
      if (v.name != target.name) others.push_back(v.name);
    }
    const std::vector<std::string> own = {target.name};
    audit.per_agent_cmi.push_back(
        infomath::ConditionalMutualInformation(joint, shared, own, others));
  }
  audit.feasible = audit.max_cmi() <= epsilon + infomath::kInfoTolerance;
  return audit;
}

Bits ClosedFormCmiThreeAgent(double s, double r, int agent) {
  using infomath::BinaryEntropy;
  if (!(s >= 0.0 && s <= 1.0) || !(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument("s and r must lie in [0, 1]");
  }
  switch (agent) {
    case 1:
      return -BinaryEntropy(s) +
             BinaryEntropy(Clamp01(s * r + (1.0 - r) * (1.0 - s)));
    case 2: {
      const double agree = (1.0 - r) * (1.0 - r) + r * r;
      const double mixed =
          ((1.0 - r) * (1.0 - r) * s + r * r * (1.0 - s)) / agree;
      return -BinaryEntropy(s) + 2.0 * r * (1.0 - r) +
             agree * BinaryEntropy(Clamp01(mixed));
    }
    case 3:
      return -BinaryEntropy(s) +
             BinaryEntropy(Clamp01(s * (1.0 - r) + r * (1.0 - s)));
    default:
      throw std::invalid_argument("agent must be 1, 2 or 3");
  }
}

double MaxInformativeS(Bits epsilon, double r) {
  return SmallestFeasibleNoise(
      [r](double s) {
        double worst = 0.0;
        for (int k = 1; k <= 3; ++k) {
          worst = std::max(worst, ClosedFormCmiThreeAgent(s, r, k));
        }
        return worst;
      },
      epsilon);
}

double LeastNoiseXorS(const ProbTable& feature_marginal, Bits epsilon) {
  const int agents = static_cast<int>(feature_marginal.variables().size());
  return SmallestFeasibleNoise(
      [&](double s) {
        return AuditPrivacy(ChannelFromXorFamily({agents, s}),
                            feature_marginal,
                            std::numeric_limits<double>::infinity())
            .max_cmi();
      },
      epsilon);
}

}  // namespace vflcost::privacy
