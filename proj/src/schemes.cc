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

#include "vflcost/schemes.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "vflcost/errors.h"
#include "vflcost/variables.h"

namespace vflcost::schemes {
namespace {

using infomath::kLogZero;
using infomath::VariableSpec;

constexpr double kOrderTolerance = 1e-12;
constexpr char kLocalDatasetName[] = "D_local";

void CheckAgent(const ParameterIntegrator& model, int agent) {
  if (agent < 1 || agent > static_cast<int>(model.features().size())) {
    throw std::invalid_argument("agent index out of range: " +
                                std::to_string(agent));
  }
}

void CheckTerms(std::uint64_t vectors, std::uint64_t cells,
                const EngineOptions& options) {
  if (vectors > options.max_terms || vectors * cells > options.max_terms) {
    throw ResourceError("enumeration needs " + std::to_string(vectors) +
                        " count vectors x " + std::to_string(cells) +
                        " cells, above the cap of " +
                        std::to_string(options.max_terms));
  }
}

void EnumerateInto(int symbols, int remaining, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
  const std::size_t pos = current.size();
  if (static_cast<int>(pos) == symbols - 1) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    current.push_back(c);
    EnumerateInto(symbols, remaining - c, current, out);
    current.pop_back();
  }
}

}  // namespace

std::string_view SchemeSpec::name() const {
  if (collaborative_learning()) {
    return collaborative_inference() ? "CL/CI" : "CL/DI";
  }
  return collaborative_inference() ? "DL/CI" : "DL/DI";
}

std::size_t SchemeSpec::index() const {
  return (collaborative_learning() ? 0 : 2) +
         (collaborative_inference() ? 0 : 1);
}

SchemeSpec ParseScheme(std::string_view name) {
  for (const auto& s : kAllSchemes) {
    if (s.name() == name) return s;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

SchemeView MakeView(const SchemeSpec& scheme, int agent) {
  SchemeView view;
  view.agent = agent;
  const std::string own = FeatureName(agent);
  view.train_visible.push_back(own);
  view.test_visible.push_back(own);
  if (scheme.collaborative_learning()) view.train_visible.push_back(kSharedName);
  if (scheme.collaborative_inference()) view.test_visible.push_back(kSharedName);
  view.train_visible.push_back(kLabelName);
  return view;
}

std::uint64_t CountVectorSpaceSize(int symbols, int n) {
  if (symbols < 1 || n < 0) {
    throw std::invalid_argument("invalid count-vector space");
  }
  // C(n + symbols - 1, n), saturating.
  std::uint64_t result = 1;
  for (int i = 1; i <= n; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(symbols - 1 + i);
    if (result > UINT64_MAX / num) return UINT64_MAX;
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

std::vector<std::vector<int>> EnumerateCountVectors(int symbols, int n) {
  if (symbols < 1 || n < 0) {
    throw std::invalid_argument("invalid count-vector space");
  }
  std::vector<std::vector<int>> out;
  out.reserve(CountVectorSpaceSize(symbols, n));
  std::vector<int> current;
  EnumerateInto(symbols, n, current, out);
  return out;
}

double LogMultinomial(std::span<const int> counts) {
  int total = 0;
  double result = 0.0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    total += c;
    result -= std::lgamma(c + 1.0);
  }
  return result + std::lgamma(total + 1.0);
}

ProbTable DatasetJoint(const ParameterIntegrator& model,
                       const AggregationChannel* channel, const VarSet& train,
                       const VarSet& test, int n,
                       const EngineOptions& options) {
  if (n < 0) throw std::invalid_argument("sample count must be >= 0");
  const auto evidence = model.Prepare(channel, train, test);
  const int symbols = static_cast<int>(evidence->support().size());
  const std::size_t cells = evidence->test_cells();
  CheckTerms(CountVectorSpaceSize(symbols, n), cells, options);
  const auto vectors = EnumerateCountVectors(symbols, n);

  std::vector<double> logmass(vectors.size() * cells);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto out = std::span<double>(logmass).subspan(i * cells, cells);
    evidence->LogEvidence(vectors[i], out);
    const double coef = LogMultinomial(vectors[i]);
    for (double& l : out) {
      if (l != kLogZero) l = std::min(0.0, l + coef);
    }
  }
  std::vector<VariableSpec> vars = {
      {kDatasetName, static_cast<int>(vectors.size())}};
  vars.insert(vars.end(), evidence->test_vars().begin(),
              evidence->test_vars().end());
  return ProbTable::FromLogMass(std::move(vars), std::move(logmass));
}

Bits SchemeLoss(const ParameterIntegrator& model, const SchemeSpec& scheme,
                int agent, int n, const AggregationChannel* channel,
                const EngineOptions& options) {
  CheckAgent(model, agent);
  if (scheme.any_collaboration() && channel == nullptr) {
    throw std::invalid_argument(std::string(scheme.name()) +
                                " needs an aggregation channel");
  }
  if (!scheme.any_collaboration()) channel = nullptr;
  const SchemeView view = MakeView(scheme, agent);
  const ProbTable joint = DatasetJoint(model, channel, view.train_visible,
                                       view.test_visible, n, options);
  VarSet given = {kDatasetName};
  given.insert(given.end(), view.test_visible.begin(), view.test_visible.end());
  const VarSet label = {kLabelName};
  return infomath::ConditionalEntropy(joint, label, given);
}

LossReport ComputeLossReport(const ParameterIntegrator& model,
                             const SchemeSpec& scheme, int n,
                             const AggregationChannel* channel,
                             const EngineOptions& options) {
  LossReport report;
  const int agents = static_cast<int>(model.features().size());
  for (int k = 1; k <= agents; ++k) {
    report.per_agent_loss.push_back(
        SchemeLoss(model, scheme, k, n, channel, options));
  }
  report.worst_case = *std::max_element(report.per_agent_loss.begin(),
                                        report.per_agent_loss.end());
  return report;
}

std::array<LossReport, 4> NonprivateLosses(const ParameterIntegrator& model,
                                           int n,
                                           const EngineOptions& options) {
  const AggregationChannel identity =
      privacy::IdentityChannel(model.features());
  std::array<LossReport, 4> out;
  for (const auto& scheme : kAllSchemes) {
    out[scheme.index()] =
        ComputeLossReport(model, scheme, n, &identity, options);
  }
  return out;
}

SchemeLosses WorstCase(const std::array<LossReport, 4>& reports) {
  SchemeLosses out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = reports[i].worst_case;
  return out;
}

Bits Cost(const SchemeSpec& a, const SchemeSpec& b,
          const SchemeLosses& losses) {
  const double diff = losses[a.index()] - losses[b.index()];
  if (diff < -kOrderTolerance) {
    throw NumericalError("cost of " + std::string(a.name()) + " over " +
                         std::string(b.name()) +
                         " is negative: " + std::to_string(diff));
  }
  return std::max(0.0, diff);
}

bool IsOrderedCostCell(const SchemeSpec& a, const SchemeSpec& b) {
  if (b == kClCi) return a == kClDi || a == kDlCi || a == kDlDi;
  if (a == kDlDi) return b == kClDi || b == kDlCi;
  return false;
}

Bits CostCellCmi(const ParameterIntegrator& model, const SchemeSpec& a,
                 const SchemeSpec& b, int agent, int n,
                 const EngineOptions& options) {
  if (!IsOrderedCostCell(a, b)) {
    throw std::invalid_argument("no closed characterization for " +
                                std::string(a.name()) + " over " +
                                std::string(b.name()));
  }
  CheckAgent(model, agent);
  if (n < 0) throw std::invalid_argument("sample count must be >= 0");

  const auto& features = model.features();
  const VariableSpec& label = model.label();
  const std::string own = FeatureName(agent);
  VarSet all_features;
  VarSet others;
  for (const auto& f : features) {
    all_features.push_back(f.name);
    if (f.name != own) others.push_back(f.name);
  }
  VarSet train = all_features;
  train.push_back(label.name);

  const auto evidence = model.Prepare(nullptr, train, all_features);
  const auto& support = evidence->support();
  const int symbols = static_cast<int>(support.size());
  const std::size_t cells = evidence->test_cells();

  // Local statistics: counts over (X_k, Y).
  const std::size_t own_pos = static_cast<std::size_t>(agent - 1);
  const int own_card = features[own_pos].cardinality;
  const int local_symbols = own_card * label.cardinality;
  const auto local_vectors = EnumerateCountVectors(local_symbols, n);
  std::map<std::vector<int>, std::size_t> local_index;
  for (std::size_t j = 0; j < local_vectors.size(); ++j) {
    local_index.emplace(local_vectors[j], j);
  }
  // Full training symbol -> local (x_k, y) symbol. Training cells are laid
  // out as (X_1..X_K, Y) with Y fastest.
  std::vector<int> to_local(support.size());
  std::size_t own_stride = label.cardinality;
  for (std::size_t i = features.size(); i-- > own_pos + 1;) {
    own_stride *= features[i].cardinality;
  }
  for (std::size_t s = 0; s < support.size(); ++s) {
    const int y = static_cast<int>(support[s] % label.cardinality);
    const int xk = static_cast<int>((support[s] / own_stride) % own_card);
    to_local[s] = xk * label.cardinality + y;
  }

  const std::uint64_t full_size = CountVectorSpaceSize(symbols, n);
  CheckTerms(full_size, cells * local_vectors.size(), options);
  const auto vectors = EnumerateCountVectors(symbols, n);
  const std::size_t nfull = vectors.size();
  std::vector<double> logmass(local_vectors.size() * nfull * cells, kLogZero);
  std::vector<double> ev(cells);
  std::vector<int> local(local_symbols);
  for (std::size_t i = 0; i < nfull; ++i) {
    evidence->LogEvidence(vectors[i], ev);
    const double coef = LogMultinomial(vectors[i]);
    std::fill(local.begin(), local.end(), 0);
    for (std::size_t s = 0; s < support.size(); ++s) {
      local[to_local[s]] += vectors[i][s];
    }
    const std::size_t j = local_index.at(local);
    double* row = logmass.data() + (j * nfull + i) * cells;
    for (std::size_t t = 0; t < cells; ++t) {
      row[t] = ev[t] == kLogZero ? kLogZero : std::min(0.0, ev[t] + coef);
    }
  }
  std::vector<VariableSpec> vars = {
      {kLocalDatasetName, static_cast<int>(local_vectors.size())},
      {kDatasetName, static_cast<int>(nfull)}};
  vars.insert(vars.end(), evidence->test_vars().begin(),
              evidence->test_vars().end());
  const ProbTable joint = ProbTable::FromLogMass(std::move(vars),
                                                 std::move(logmass));

  const VarSet y = {label.name};
  const VarSet full = {kDatasetName};
  const auto join = [](VarSet lhs, const VarSet& rhs) {
    lhs.insert(lhs.end(), rhs.begin(), rhs.end());
    return lhs;
  };
  const VarSet own_local = {own, kLocalDatasetName};
  if (b == kClCi && a == kClDi) {
    // I(Y; X_{-k} | X_k, full data)
    return infomath::ConditionalMutualInformation(joint, y, others,
                                                  join({own}, full));
  }
  if (b == kClCi && a == kDlCi) {
    // I(Y; other columns | X, own column, labels)
    return infomath::ConditionalMutualInformation(
        joint, y, full, join(all_features, {kLocalDatasetName}));
  }
  if (b == kClCi && a == kDlDi) {
    // I(Y; X_{-k}, other columns | X_k, own column, labels)
    return infomath::ConditionalMutualInformation(joint, y, join(others, full),
                                                  own_local);
  }
  if (b == kClDi) {
    // I(Y; other columns | own column, labels, X_k)
    return infomath::ConditionalMutualInformation(joint, y, full, own_local);
  }
  // (DL/DI, DL/CI): I(Y; X_{-k} | X_k, own column, labels)
  return infomath::ConditionalMutualInformation(joint, y, others, own_local);
}

}  // namespace vflcost::schemes
