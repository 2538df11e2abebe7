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
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "vflcost/bayes_model.h"
#include "vflcost/optimizer.h"
#include "vflcost/privacy.h"
#include "vflcost/schemes.h"
#include "vflcost/variables.h"

namespace vflcost::optimizer {
namespace {

using schemes::kAllSchemes;
using schemes::kClCi;
using schemes::kClDi;
using schemes::kDlCi;
using schemes::kDlDi;

const bayes::ConjugateIntegrator& Model() {
  static const bayes::ConjugateIntegrator model({3, 0.5, bayes::BetaHyper{}});
  return model;
}

double XorLoss(const schemes::SchemeSpec& scheme, double s) {
  const auto channel = privacy::ChannelFromXorFamily({3, s});
  return schemes::ComputeLossReport(Model(), scheme, 3, &channel).worst_case;
}

std::vector<double> Grid41() {
  std::vector<double> eps;
  for (int i = 0; i <= 40; ++i) eps.push_back(i / 40.0);
  return eps;
}

TEST_CASE("no budget means no benefit from collaboration") {
  PrivateLossSolver solver(Model(), MechanismFamily::Xor(3), 3);
  const double dldi = solver.Solve(kDlDi, 0.0).loss;
  for (const auto& scheme : kAllSchemes) {
    const auto point = solver.Solve(scheme, 0.0);
    CHECK(std::abs(point.loss - dldi) < 1e-12);
    if (scheme != kDlDi) {
      REQUIRE(point.mechanism.s.has_value());
      CHECK(*point.mechanism.s == 0.5);
    }
  }
}

TEST_CASE("a budget of one bit is the noiseless mechanism") {
  PrivateLossSolver solver(Model(), MechanismFamily::Xor(3), 3);
  for (const auto& scheme : kAllSchemes) {
    for (double eps : {1.0, 1.5, 10.0}) {
      const auto point = solver.Solve(scheme, eps);
      CHECK(std::abs(point.loss - XorLoss(scheme, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("decentralized loss does not depend on epsilon") {
  PrivateLossSolver solver(Model(), MechanismFamily::Xor(3), 3);
  const double ref = solver.Solve(kDlDi, 0.0).loss;
  for (double eps : Grid41()) {
    const auto point = solver.Solve(kDlDi, eps);
    CHECK(point.loss == ref);
    CHECK(!point.mechanism.s.has_value());
  }
}

TEST_CASE("private loss curve") {
  const auto eps = Grid41();
  const std::vector<schemes::SchemeSpec> order(kAllSchemes.begin(),
                                               kAllSchemes.end());
  const auto curve =
      ComputePrivateLossCurve(Model(), order, MechanismFamily::Xor(3), eps, 3);
  REQUIRE(curve.points.size() == 4);
  const auto law = bayes::ParityFeatureLaw(3, 0.5);
  for (std::size_t si = 0; si < 4; ++si) {
    REQUIRE(curve.points[si].size() == eps.size());
    for (std::size_t i = 1; i < eps.size(); ++i) {
      CHECK(curve.points[si][i].loss <= curve.points[si][i - 1].loss + 1e-12);
    }
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const auto& point = curve.points[si][i];
      CHECK(!point.grid_fallback);
      if (point.mechanism.s) {
        CHECK(privacy::AuditPrivacy(
                  privacy::ChannelFromXorFamily({3, *point.mechanism.s}), law,
                  eps[i])
                  .feasible);
      }
    }
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double clci = curve.points[kClCi.index()][i].loss;
    CHECK(clci <= curve.points[kClDi.index()][i].loss + 1e-12);
    CHECK(clci <= curve.points[kDlCi.index()][i].loss + 1e-12);
    CHECK(curve.points[kDlDi.index()][i].loss ==
          curve.points[kDlDi.index()][0].loss);
  }
  for (std::size_t si = 0; si < 4; ++si) {
    CHECK(std::abs(curve.points[si][0].loss -
                   curve.points[kDlDi.index()][0].loss) < 1e-12);
  }
  std::vector<double> unsorted = {0.5, 0.1};
  CHECK_THROWS_AS(ComputePrivateLossCurve(Model(), order,
                                          MechanismFamily::Xor(3), unsorted, 3),
                  std::invalid_argument);
}

TEST_CASE("least noise is optimal on the feasible s-grid") {
  const auto law = bayes::ParityFeatureLaw(3, 0.5);
  PrivateLossSolver solver(Model(), MechanismFamily::Xor(3), 3);
  for (double eps : {0.05, 0.3, 0.7}) {
    for (const auto& scheme : {kClCi, kClDi, kDlCi}) {
      const auto point = solver.Solve(scheme, eps);
      double best = 2.0;
      for (int i = 0; i <= 50; ++i) {
        const double s = i / 100.0;
        const auto channel = privacy::ChannelFromXorFamily({3, s});
        if (!privacy::AuditPrivacy(channel, law, eps).feasible) continue;
        best = std::min(best, XorLoss(scheme, s));
      }
      CHECK(point.loss <= best + 1e-9);
    }
  }
}

TEST_CASE("explicit list matches the xor family") {
  std::vector<privacy::AggregationChannel> members;
  for (int i = 0; i <= 500; ++i) {
    members.push_back(privacy::ChannelFromXorFamily({3, i / 1000.0}));
  }
  PrivateLossSolver listed(Model(), MechanismFamily::List(members), 3);
  PrivateLossSolver analytic(Model(), MechanismFamily::Xor(3), 3);
  for (double eps : {0.0, 0.1, 0.4, 1.0}) {
    for (const auto& scheme : {kClCi, kDlCi}) {
      const auto a = listed.Solve(scheme, eps);
      const auto b = analytic.Solve(scheme, eps);
      CHECK(std::abs(a.loss - b.loss) < 2e-3);
      CHECK(a.loss >= b.loss - 1e-12);
      REQUIRE(a.mechanism.list_index.has_value());
      REQUIRE(a.mechanism.channel.has_value());
    }
  }
}

TEST_CASE("list ties go to the earliest member") {
  const auto c = privacy::ChannelFromXorFamily({3, 0.3});
  PrivateLossSolver solver(Model(), MechanismFamily::List({c, c, c}), 3);
  const auto point = solver.Solve(kClCi, 1.0);
  REQUIRE(point.mechanism.list_index.has_value());
  CHECK(*point.mechanism.list_index == 0);
}

TEST_CASE("infeasible lists and bad inputs") {
  const auto identity = privacy::IdentityChannel(vflcost::BinaryFeatures(3));
  PrivateLossSolver solver(Model(), MechanismFamily::List({identity}), 3);
  CHECK_THROWS_AS(solver.Solve(kClCi, 0.5), std::invalid_argument);
  CHECK_NOTHROW(solver.Solve(kClCi, 1.0));
  CHECK_NOTHROW(solver.Solve(kDlDi, 0.5));
  CHECK_THROWS_AS(solver.Solve(kClCi, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(PrivateLossSolver(Model(), MechanismFamily::List({}), 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(PrivateLossSolver(Model(), MechanismFamily::Xor(2), 3),
                  std::invalid_argument);
}

TEST_CASE("one-shot helper agrees with the solver") {
  PrivateLossSolver solver(Model(), MechanismFamily::Xor(3), 3);
  const auto a = solver.Solve(kClDi, 0.25);
  const auto b = ComputePrivateLoss(Model(), kClDi, MechanismFamily::Xor(3),
                                    0.25, 3);
  CHECK(a.loss == b.loss);
  CHECK(a.mechanism.s == b.mechanism.s);
}

}  // namespace
}  // namespace vflcost::optimizer
