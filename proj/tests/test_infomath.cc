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
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "vflcost/bayes_model.h"
#include "vflcost/errors.h"
#include "vflcost/infomath.h"

namespace vflcost::infomath {
namespace {

using testing::OracleBinaryEntropy;
using testing::OracleEntropy;
using testing::RandomProbs;

std::vector<VariableSpec> Binary(int count) {
  std::vector<VariableSpec> vars;
  for (int i = 0; i < count; ++i) vars.push_back({"V" + std::to_string(i), 2});
  return vars;
}

VarSet Names(const std::vector<VariableSpec>& vars, std::vector<int> pick) {
  VarSet out;
  for (int i : pick) out.push_back(vars[i].name);
  return out;
}

// Two-agent feature law: equal cells r/2, unequal cells (1-r)/2.
ProbTable PairLaw(double r) {
  const double p[] = {r / 2, (1 - r) / 2, (1 - r) / 2, r / 2};
  return ProbTable::FromProbabilities({{"X1", 2}, {"X2", 2}}, p);
}

TEST_CASE("binary entropy reference values") {
  CHECK(BinaryEntropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(BinaryEntropy(0.0) == 0.0);
  CHECK(BinaryEntropy(1.0) == 0.0);
  // 40-digit evaluation of -r log2 r - (1-r) log2 (1-r) at r = 0.11.
  CHECK(std::abs(BinaryEntropy(0.11) - 0.4999159581645279956) < 1e-15);
  for (double r = 0.0; r <= 1.0; r += 0.01) {
    CHECK(std::abs(BinaryEntropy(r) -
                   static_cast<double>(OracleBinaryEntropy(r))) < 1e-14);
  }
  CHECK_THROWS_AS(BinaryEntropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(BinaryEntropy(1.01), std::domain_error);
  CHECK_THROWS_AS(BinaryEntropy(std::nan("")), std::domain_error);
}

TEST_CASE("log-sum-exp") {
  const double a[] = {std::log(0.25), std::log(0.25), std::log(0.5)};
  CHECK(std::abs(LogSumExp(a)) < 1e-15);
  const double b[] = {-1000.0, -1000.0};
  CHECK(LogSumExp(b) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
  const double c[] = {-745.0};
  CHECK(LogSumExp(c) == -745.0);
  CHECK(LogSumExp(std::span<const double>()) == kLogZero);
  const double d[] = {kLogZero, kLogZero};
  CHECK(LogSumExp(d) == kLogZero);
  const double e[] = {800.0, 800.0};
  CHECK(LogSumExp(e) == doctest::Approx(800.0 + std::log(2.0)));
  CHECK(LogAddExp(kLogZero, -3.0) == -3.0);
  CHECK(LogAddExp(std::log(0.5), std::log(0.5)) == doctest::Approx(0.0));
}

TEST_CASE("table construction rejects malformed input") {
  const double ok[] = {0.5, 0.5};
  CHECK_NOTHROW(ProbTable::FromProbabilities({{"A", 2}}, ok));
  const double unnormalized[] = {0.5, 0.6};
  CHECK_THROWS_AS(ProbTable::FromProbabilities({{"A", 2}}, unnormalized),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProbTable::FromProbabilities({{"A", 3}}, ok),
                  std::invalid_argument);
  const double four[] = {0.25, 0.25, 0.25, 0.25};
  CHECK_THROWS_AS(ProbTable::FromProbabilities({{"A", 2}, {"A", 2}}, four),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProbTable::FromProbabilities({{"A", 0}}, ok),
                  std::invalid_argument);
  const double negative[] = {1.5, -0.5};
  CHECK_THROWS_AS(ProbTable::FromProbabilities({{"A", 2}}, negative),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProbTable::FromLogMass({{"A", 2}}, {0.1, kLogZero}),
                  std::invalid_argument);
  const auto t = ProbTable::FromLogWeights({{"A", 2}}, {std::log(3.0), 0.0});
  const int one[] = {0};
  CHECK(t.Prob(one) == doctest::Approx(0.75));
}

TEST_CASE("encode and decode are inverse, last variable fastest") {
  std::vector<double> p(24, 1.0 / 24);
  const auto t =
      ProbTable::FromProbabilities({{"A", 2}, {"B", 3}, {"C", 4}}, p);
  int abc[] = {1, 2, 3};
  CHECK(t.Encode(abc) == 23);
  int back[3];
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    t.Decode(flat, back);
    CHECK(t.Encode(back) == flat);
  }
  int c_step[] = {0, 0, 1};
  CHECK(t.Encode(c_step) == 1);
  CHECK(t.IndexOf("B") == 1);
  CHECK_THROWS_AS(t.IndexOf("Z"), std::invalid_argument);
}

TEST_CASE("entropy examples") {
  const double uniform[] = {0.25, 0.25, 0.25, 0.25};
  const auto u = ProbTable::FromProbabilities({{"A", 2}, {"B", 2}}, uniform);
  CHECK(Entropy(u, VarSet{"A", "B"}) == doctest::Approx(2.0).epsilon(1e-14));
  const double point[] = {0.0, 0.0, 1.0, 0.0};
  const auto pm = ProbTable::FromProbabilities({{"A", 2}, {"B", 2}}, point);
  CHECK(Entropy(pm, VarSet{"A", "B"}) == 0.0);
  CHECK_THROWS_AS(Entropy(u, VarSet{"Q"}), std::invalid_argument);

  const auto law = PairLaw(0.3);
  const double h = Entropy(law, VarSet{"X1", "X2"});
  // Direct sum over the four cells.
  const long double direct = OracleEntropy({0.15L, 0.35L, 0.35L, 0.15L});
  CHECK(std::abs(h - static_cast<double>(direct)) < 1e-14);
  CHECK(std::abs(h - (1.0 + 0.8812908992306926182)) < 1e-14);
}

TEST_CASE("conditional entropy examples") {
  const double uniform[] = {0.25, 0.25, 0.25, 0.25};
  const auto u = ProbTable::FromProbabilities({{"A", 2}, {"B", 2}}, uniform);
  CHECK(ConditionalEntropy(u, VarSet{"A"}, VarSet{"B"}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const double equal[] = {0.5, 0.0, 0.0, 0.5};
  const auto eq = ProbTable::FromProbabilities({{"A", 2}, {"B", 2}}, equal);
  CHECK(ConditionalEntropy(eq, VarSet{"A"}, VarSet{"B"}) == 0.0);
  CHECK_THROWS_AS(ConditionalEntropy(u, VarSet{"A"}, VarSet{"A"}),
                  std::invalid_argument);

  // H(X1|X2) = H(X1,X2) - H(X2), summed cell by cell.
  const auto law = PairLaw(0.3);
  const long double joint = OracleEntropy({0.15L, 0.35L, 0.35L, 0.15L});
  const long double marg = OracleEntropy({0.5L, 0.5L});
  CHECK(std::abs(ConditionalEntropy(law, VarSet{"X1"}, VarSet{"X2"}) -
                 static_cast<double>(joint - marg)) < 1e-14);
  CHECK(std::abs(ConditionalEntropy(law, VarSet{"X1"}, VarSet{"X2"}) -
                 BinaryEntropy(0.3)) < 1e-14);
}

TEST_CASE("mutual information of the two-agent feature law") {
  CHECK(MutualInformation(PairLaw(0.0), VarSet{"X1"}, VarSet{"X2"}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(MutualInformation(PairLaw(1.0), VarSet{"X1"}, VarSet{"X2"}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(MutualInformation(PairLaw(0.5), VarSet{"X1"}, VarSet{"X2"})) <
        1e-15);
  const double expected =
      1.0 - static_cast<double>(OracleBinaryEntropy(0.3L));
  CHECK(std::abs(MutualInformation(PairLaw(0.3), VarSet{"X1"}, VarSet{"X2"}) -
                 expected) < 1e-14);
  CHECK_THROWS_AS(
      MutualInformation(PairLaw(0.3), VarSet{"X1"}, VarSet{"X1", "X2"}),
      std::invalid_argument);
}

TEST_CASE("conditional mutual information examples") {
  std::mt19937_64 rng(7);
  // B independent of (A, C).
  const auto pac = RandomProbs(4, rng);
  const auto pb = RandomProbs(2, rng);
  std::vector<double> p(8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) p[a * 4 + b * 2 + c] = pac[a * 2 + c] * pb[b];
  const auto indep =
      ProbTable::FromProbabilities({{"A", 2}, {"B", 2}, {"C", 2}}, p);
  CHECK(ConditionalMutualInformation(indep, VarSet{"A"}, VarSet{"B"},
                                     VarSet{"C"}) < 1e-14);

  // Markov chain A - C - B.
  const auto pa = RandomProbs(2, rng);
  const auto pc_a = RandomProbs(4, rng);
  const auto pb_c = RandomProbs(4, rng);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const double c_given_a = pc_a[a * 2 + c] / (pc_a[a * 2] + pc_a[a * 2 + 1]);
        const double b_given_c = pb_c[c * 2 + b] / (pb_c[c * 2] + pb_c[c * 2 + 1]);
        p[a * 4 + b * 2 + c] = pa[a] * c_given_a * b_given_c;
      }
  const auto chain =
      ProbTable::FromProbabilities({{"A", 2}, {"B", 2}, {"C", 2}}, p);
  CHECK(ConditionalMutualInformation(chain, VarSet{"A"}, VarSet{"B"},
                                     VarSet{"C"}) < 1e-13);

  // Noiseless three-way parity: I(Xhat; X3 | X1, X2) = 1 bit, by hand:
  // given (X1, X2), Xhat is a relabeling of the uniform X3.
  std::vector<double> q(16, 0.0);
  for (int x = 0; x < 8; ++x) {
    const int parity = std::popcount(static_cast<unsigned>(x)) & 1;
    q[x * 2 + parity] = 1.0 / 8;
  }
  const auto xor_joint = ProbTable::FromProbabilities(
      {{"X1", 2}, {"X2", 2}, {"X3", 2}, {"Xhat", 2}}, q);
  CHECK(ConditionalMutualInformation(xor_joint, VarSet{"Xhat"}, VarSet{"X3"},
                                     VarSet{"X1", "X2"}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(MutualInformation(xor_joint, VarSet{"Xhat"}, VarSet{"X3"}) < 1e-14);
  CHECK_THROWS_AS(ConditionalMutualInformation(xor_joint, VarSet{"Xhat"},
                                               VarSet{"X3"}, VarSet{"X3"}),
                  std::invalid_argument);
}

TEST_CASE("chain rule on random tables") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int count = 2 + static_cast<int>(rng() % 4);
    const auto vars = Binary(count);
    const auto probs = RandomProbs(std::size_t{1} << count, rng,
                                   trial % 3 == 0 ? 0.4 : 0.0);
    const auto table = ProbTable::FromProbabilities(vars, probs);
    // Random disjoint split into A, B, C (C may be empty).
    std::vector<int> role(count);
    for (auto& r : role) r = static_cast<int>(rng() % 3);
    role[0] = 0;
    role[1] = 1;
    std::vector<int> ia, ib, ic;
    for (int i = 0; i < count; ++i) {
      (role[i] == 0 ? ia : role[i] == 1 ? ib : ic).push_back(i);
    }
    const auto a = Names(vars, ia), b = Names(vars, ib), c = Names(vars, ic);
    VarSet ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    VarSet bc = b;
    bc.insert(bc.end(), c.begin(), c.end());

    CHECK(std::abs(Entropy(table, ab) -
                   (Entropy(table, b) + ConditionalEntropy(table, a, b))) <
          1e-12);
    // Conditioning reduces entropy.
    CHECK(ConditionalEntropy(table, a, bc) <=
          ConditionalEntropy(table, a, b) + 1e-12);
    if (!c.empty()) {
      CHECK(ConditionalEntropy(table, a, bc) <=
            ConditionalEntropy(table, a, c) + 1e-12);
      CHECK(std::abs(ConditionalMutualInformation(table, a, b, c) -
                     (ConditionalEntropy(table, a, c) -
                      ConditionalEntropy(table, a, bc))) < 1e-12);
      CHECK(ConditionalMutualInformation(table, a, b, c) >= 0.0);
    }
    CHECK(std::abs(MutualInformation(table, a, b) -
                   (Entropy(table, a) - ConditionalEntropy(table, a, b))) <
          1e-12);
    CHECK(Entropy(table, a) >= 0.0);
    CHECK(ConditionalEntropy(table, a, b) >= 0.0);
    CHECK(MutualInformation(table, a, b) >= 0.0);

    // Entropy against a direct cell sum.
    std::vector<long double> lp(probs.begin(), probs.end());
    CHECK(std::abs(Entropy(table, Names(vars, [&] {
                     std::vector<int> all(count);
                     std::iota(all.begin(), all.end(), 0);
                     return all;
                   }())) -
                   static_cast<double>(OracleEntropy(lp))) < 1e-12);
  }
}

TEST_CASE("marginalization order does not matter") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto vars = Binary(5);
    const auto table =
        ProbTable::FromProbabilities(vars, RandomProbs(32, rng, 0.2));
    const auto direct = table.Marginal(VarSet{"V0", "V3"});
    const auto via_a = table.Marginal(VarSet{"V0", "V1", "V3"})
                           .Marginal(VarSet{"V0", "V3"});
    const auto via_b = table.Marginal(VarSet{"V4", "V3", "V2", "V0"})
                           .Marginal(VarSet{"V0", "V3"});
    for (std::size_t i = 0; i < direct.size(); ++i) {
      CHECK(std::abs(std::exp(direct.logmass()[i]) -
                     std::exp(via_a.logmass()[i])) < 1e-14);
      CHECK(std::abs(std::exp(direct.logmass()[i]) -
                     std::exp(via_b.logmass()[i])) < 1e-14);
    }
    // Reordered targets permute cells.
    const auto swapped = table.Marginal(VarSet{"V3", "V0"});
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int ab[] = {a, b}, ba[] = {b, a};
        CHECK(direct.Prob(ab) == doctest::Approx(swapped.Prob(ba)));
      }
  }
}

TEST_CASE("projection index points at the marginal cell") {
  std::mt19937_64 rng(5);
  const auto vars = Binary(4);
  const auto table = ProbTable::FromProbabilities(vars, RandomProbs(16, rng));
  const VarSet targets = {"V2", "V0"};
  const auto index = table.ProjectionIndex(targets);
  const auto marginal = table.Marginal(targets);
  std::vector<double> acc(marginal.size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    acc[index[i]] += std::exp(table.logmass()[i]);
  }
  for (std::size_t j = 0; j < marginal.size(); ++j) {
    CHECK(acc[j] == doctest::Approx(std::exp(marginal.logmass()[j])));
  }
}

TEST_CASE("uniform n-ary entropy is log2 n") {
  for (int n = 1; n <= 64; ++n) {
    std::vector<double> p(n, 1.0 / n);
    const auto t = ProbTable::FromProbabilities({{"U", n}}, p);
    CHECK(std::abs(Entropy(t, VarSet{"U"}) - std::log2(n)) < 1e-12);
  }
}

TEST_CASE("empty target and given sets") {
  const double p[] = {0.2, 0.8};
  const auto t = ProbTable::FromProbabilities({{"A", 2}}, p);
  CHECK(Entropy(t, VarSet{}) == 0.0);
  CHECK(ConditionalEntropy(t, VarSet{"A"}, VarSet{}) ==
        doctest::Approx(BinaryEntropy(0.2)));
}

}  // namespace
}  // namespace vflcost::infomath
