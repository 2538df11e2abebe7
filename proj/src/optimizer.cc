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

#include "vflcost/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vflcost::optimizer {
namespace {

constexpr int kGridSteps = 50;  // s = step / 100
constexpr double kOptimalityTolerance = 1e-9;

double GridS(int step) { return step / 100.0; }

void CheckEpsilon(Bits epsilon) {
  if (std::isnan(epsilon) || epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
}

}  // namespace

PrivateLossSolver::PrivateLossSolver(const bayes::ParameterIntegrator& model,
                                     MechanismFamily family, int n,
                                     EngineOptions options)
    : model_(model),
      family_(std::move(family)),
      n_(n),
      options_(options),
      feature_marginal_(model.FeatureMarginal()) {
  if (const auto* list = std::get_if<ChannelList>(&family_.kind)) {
    if (list->members.empty()) {
      throw std::invalid_argument("mechanism list is empty");
    }
    for (const auto& member : list->members) {
      list_audits_.push_back(privacy::AuditPrivacy(
          member, feature_marginal_, std::numeric_limits<double>::infinity()));
    }
  } else if (std::get<XorNoise>(family_.kind).agents !=
             static_cast<int>(model.features().size())) {
    throw std::invalid_argument("xor family arity differs from the model");
  }
}

PrivateLoss PrivateLossSolver::Solve(const SchemeSpec& scheme, Bits epsilon) {
  CheckEpsilon(epsilon);
  if (!scheme.any_collaboration()) {
    PrivateLoss out;
    out.report = schemes::ComputeLossReport(model_, scheme, n_, nullptr,
                                            options_);
    out.loss = out.report.worst_case;
    return out;
  }
  if (const auto* xor_family = std::get_if<XorNoise>(&family_.kind)) {
    return SolveXor(scheme, epsilon, xor_family->agents);
  }
  return SolveList(scheme, epsilon, std::get<ChannelList>(family_.kind));
}

const LossReport& PrivateLossSolver::GridLoss(const SchemeSpec& scheme,
                                              int step) {
  const auto key = std::make_pair(scheme.index(), step);
  auto it = grid_losses_.find(key);
  if (it == grid_losses_.end()) {
    const int agents = static_cast<int>(model_.features().size());
    const auto channel = privacy::ChannelFromXorFamily({agents, GridS(step)});
    it = grid_losses_
             .emplace(key, schemes::ComputeLossReport(model_, scheme, n_,
                                                      &channel, options_))
             .first;
  }
  return it->second;
}

bool PrivateLossSolver::GridFeasible(int step, Bits epsilon) {
  auto it = grid_leakage_.find(step);
  if (it == grid_leakage_.end()) {
    const int agents = static_cast<int>(model_.features().size());
    const auto audit = privacy::AuditPrivacy(
        privacy::ChannelFromXorFamily({agents, GridS(step)}),
        feature_marginal_, std::numeric_limits<double>::infinity());
    it = grid_leakage_.emplace(step, audit.max_cmi()).first;
  }
  return it->second <= epsilon + infomath::kInfoTolerance;
}

PrivateLoss PrivateLossSolver::SolveXor(const SchemeSpec& scheme,
                                        Bits epsilon, int agents) {
  const double s = privacy::LeastNoiseXorS(feature_marginal_, epsilon);
  PrivateLoss out;
  out.mechanism.s = s;
  out.mechanism.channel = privacy::ChannelFromXorFamily({agents, s});
  out.report = schemes::ComputeLossReport(model_, scheme, n_,
                                          &*out.mechanism.channel, options_);
  out.loss = out.report.worst_case;
  if (!family_.verify_optimality) return out;

  int best_step = -1;
  for (int step = 0; step <= kGridSteps; ++step) {
    if (!GridFeasible(step, epsilon)) continue;
    const LossReport& report = GridLoss(scheme, step);
    if (report.worst_case < out.loss - kOptimalityTolerance &&
        (best_step < 0 ||
         report.worst_case < GridLoss(scheme, best_step).worst_case)) {
      best_step = step;
    }
  }
  if (best_step >= 0) {
    out.grid_fallback = true;
    out.mechanism.s = GridS(best_step);
    out.mechanism.channel =
        privacy::ChannelFromXorFamily({agents, GridS(best_step)});
    out.report = GridLoss(scheme, best_step);
    out.loss = out.report.worst_case;
  }
  return out;
}

const LossReport& PrivateLossSolver::ListLoss(const SchemeSpec& scheme,
                                              std::size_t member) {
  const auto key = std::make_pair(scheme.index(), member);
  auto it = list_losses_.find(key);
  if (it == list_losses_.end()) {
    const auto& channel = std::get<ChannelList>(family_.kind).members[member];
    it = list_losses_
             .emplace(key, schemes::ComputeLossReport(model_, scheme, n_,
                                                      &channel, options_))
             .first;
  }
  return it->second;
}

PrivateLoss PrivateLossSolver::SolveList(const SchemeSpec& scheme,
                                         Bits epsilon,
                                         const ChannelList& list) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < list.members.size(); ++i) {
    if (list_audits_[i].max_cmi() > epsilon + infomath::kInfoTolerance) {
      continue;
    }
    if (!best || ListLoss(scheme, i).worst_case <
                     ListLoss(scheme, *best).worst_case) {
      best = i;
    }
  }
  if (!best) {
    throw std::invalid_argument("no listed mechanism satisfies epsilon = " +
                                std::to_string(epsilon));
  }
  PrivateLoss out;
  out.report = ListLoss(scheme, *best);
  out.loss = out.report.worst_case;
  out.mechanism.list_index = *best;
  out.mechanism.channel = list.members[*best];
  return out;
}

PrivateLoss ComputePrivateLoss(const bayes::ParameterIntegrator& model,
                               const SchemeSpec& scheme,
                               const MechanismFamily& family, Bits epsilon,
                               int n, const EngineOptions& options) {
  PrivateLossSolver solver(model, family, n, options);
  return solver.Solve(scheme, epsilon);
}

PrivateLossCurve ComputePrivateLossCurve(
    const bayes::ParameterIntegrator& model,
    const std::vector<SchemeSpec>& schemes, const MechanismFamily& family,
    const std::vector<Bits>& epsilons, int n, const EngineOptions& options) {
  if (!std::is_sorted(epsilons.begin(), epsilons.end())) {
    throw std::invalid_argument("epsilon grid must be sorted ascending");
  }
  PrivateLossSolver solver(model, family, n, options);
  PrivateLossCurve curve;
  curve.epsilons = epsilons;
  curve.schemes = schemes;
  for (const auto& scheme : schemes) {
    auto& row = curve.points.emplace_back();
    for (Bits eps : epsilons) row.push_back(solver.Solve(scheme, eps));
  }
  return curve;
}

}  // namespace vflcost::optimizer
