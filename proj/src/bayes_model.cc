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

#include "vflcost/bayes_model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "vflcost/variables.h"

namespace vflcost::bayes {
namespace {

using infomath::kLogZero;

constexpr double kNormTolerance = 1e-12;

double LogBeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double LogChoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// c * log(q) with 0 * log(0) = 0.
double ScaledLog(int c, double log_q) {
  return c == 0 ? 0.0 : c * log_q;
}

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

// Gauss-Legendre nodes and weights on (0, 1).
void GaussLegendreUnit(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // Map [-1, 1] onto (0, 1); node i and its mirror share the weight.
    nodes[i] = 0.5 * (1.0 - z);
    nodes[n - 1 - i] = 0.5 * (1.0 + z);
    weights[i] = weights[n - 1 - i] = 0.5 * w;
  }
}

// Log quadrature weights of Beta(alpha, beta) on the nodes w = sin^2(pi t/2),
// unnormalized.
std::vector<double> BetaLogWeights(std::span<const double> t,
                                   std::span<const double> gl_weights,
                                   double alpha, double beta) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double half_angle = 0.5 * std::numbers::pi * t[i];
    const double log_w = 2.0 * std::log(std::sin(half_angle));
    const double log_1mw = 2.0 * std::log(std::cos(half_angle));
    const double log_jac = std::log(0.5 * std::numbers::pi *
                                    std::sin(std::numbers::pi * t[i]));
    out[i] = std::log(gl_weights[i]) + log_jac + (alpha - 1.0) * log_w +
             (beta - 1.0) * log_1mw;
  }
  return out;
}

// Conditional table over (X1..XK, Y) at (w1, w2).
std::vector<double> ParityCondProbs(const ProbTable& feature_law, double w1,
                                    double w2) {
  const auto lf = feature_law.logmass();
  std::vector<double> out(lf.size() * 2);
  for (std::size_t x = 0; x < lf.size(); ++x) {
    const double px = std::exp(lf[x]);
    const double p1 = (std::popcount(x) & 1) ? w2 : w1;
    out[2 * x] = px * (1.0 - p1);
    out[2 * x + 1] = px * p1;
  }
  return out;
}

std::size_t PositionOf(const std::vector<VariableSpec>& vars,
                       const std::string& name) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == name) return i;
  }
  return vars.size();
}

// Digit of variable `pos` in flat index `cell` of `vars`.
int DigitOf(const std::vector<VariableSpec>& vars, std::size_t pos,
            std::size_t cell) {
  std::size_t stride = 1;
  for (std::size_t i = vars.size(); i-- > pos + 1;) stride *= vars[i].cardinality;
  return static_cast<int>((cell / stride) % vars[pos].cardinality);
}

void CheckViewSets(const VariableSpec& label, const VarSet& train,
                   const VarSet& test) {
  if (std::find(train.begin(), train.end(), label.name) == train.end()) {
    throw std::invalid_argument("training view must contain the label");
  }
  if (std::find(test.begin(), test.end(), label.name) != test.end()) {
    throw std::invalid_argument("test view must not contain the label");
  }
}

VarSet WithLabel(VarSet test, const VariableSpec& label) {
  test.push_back(label.name);
  return test;
}

class GridEvidence final : public ViewEvidence {
 public:
  GridEvidence(const ModelClass& model, const AggregationChannel* channel,
               const VarSet& train, const VarSet& test) {
    const VisibleMap train_map(model.features(), model.label(), channel,
                               train);
    const VisibleMap test_map(model.features(), model.label(), channel,
                              WithLabel(test, model.label()));
    train_vars_ = train_map.visible_vars();
    test_vars_ = test_map.visible_vars();
    test_cells_ = test_map.size();
    params_ = model.num_params();
    log_prior_.assign(model.prior_logweights().begin(),
                      model.prior_logweights().end());
    prior_.resize(params_);
    for (std::size_t w = 0; w < params_; ++w) prior_[w] = std::exp(log_prior_[w]);

    std::vector<double> qa_all(train_map.size() * params_);
    test_probs_.assign(test_cells_ * params_, 0.0);
    std::vector<double> qa(train_map.size());
    std::vector<double> qt(test_cells_);
    for (std::size_t w = 0; w < params_; ++w) {
      train_map.Apply(model.CondProbs(w), qa);
      test_map.Apply(model.CondProbs(w), qt);
      for (std::size_t a = 0; a < qa.size(); ++a) qa_all[a * params_ + w] = qa[a];
      for (std::size_t t = 0; t < qt.size(); ++t) {
        test_probs_[t * params_ + w] = qt[t];
      }
    }
    test_live_.assign(test_cells_, false);
    for (std::size_t t = 0; t < test_cells_; ++t) {
      const auto row = std::span<const double>(test_probs_).subspan(
          t * params_, params_);
      test_live_[t] =
          std::any_of(row.begin(), row.end(), [](double q) { return q > 0; });
    }
    for (std::size_t a = 0; a < train_map.size(); ++a) {
      const auto row = std::span<const double>(qa_all).subspan(a * params_,
                                                               params_);
      if (std::any_of(row.begin(), row.end(), [](double q) { return q > 0; })) {
        support_.push_back(a);
        train_.insert(train_.end(), row.begin(), row.end());
      }
    }
  }

  void LogEvidence(std::span<const int> counts,
                   std::span<double> out) const override {
    if (LinearEvidence(counts, out)) return;
    std::vector<double> logw(log_prior_);
    for (std::size_t a = 0; a < counts.size(); ++a) {
      if (counts[a] == 0) continue;
      const double* row = train_.data() + a * params_;
      for (std::size_t w = 0; w < params_; ++w) {
        logw[w] += counts[a] * SafeLog(row[w]);
      }
    }
    const double max = *std::max_element(logw.begin(), logw.end());
    if (max == kLogZero) {
      std::fill(out.begin(), out.end(), kLogZero);
      return;
    }
    for (double& l : logw) l = std::exp(l - max);
    for (std::size_t t = 0; t < test_cells_; ++t) {
      if (!test_live_[t]) {
        out[t] = kLogZero;
        continue;
      }
      const double sum = Dot(logw.data(), test_probs_.data() + t * params_);
      out[t] = sum > 0.0 ? max + std::log(sum) : kLogZero;
    }
  }

 private:
  // Posterior weights as plain products; declines (returns false) when they
  // come too close to underflow, leaving the log-domain path to take over.
  bool LinearEvidence(std::span<const int> counts,
                      std::span<double> out) const {
    constexpr double kFloor = 1e-250;
    std::vector<double> v(prior_);
    for (std::size_t a = 0; a < counts.size(); ++a) {
      const double* row = train_.data() + a * params_;
      for (int rep = 0; rep < counts[a]; ++rep) {
        for (std::size_t w = 0; w < params_; ++w) v[w] *= row[w];
      }
    }
    if (!(*std::max_element(v.begin(), v.end()) >= kFloor)) return false;
    for (std::size_t t = 0; t < test_cells_; ++t) {
      if (!test_live_[t]) {
        out[t] = kLogZero;
        continue;
      }
      const double sum = Dot(v.data(), test_probs_.data() + t * params_);
      out[t] = sum > 0.0 ? std::log(sum) : kLogZero;
    }
    return true;
  }

  // Four independent accumulators so the loop pipelines.
  double Dot(const double* a, const double* b) const {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t w = 0;
    for (; w + 4 <= params_; w += 4) {
      acc[0] += a[w] * b[w];
      acc[1] += a[w + 1] * b[w + 1];
      acc[2] += a[w + 2] * b[w + 2];
      acc[3] += a[w + 3] * b[w + 3];
    }
    for (; w < params_; ++w) acc[0] += a[w] * b[w];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }

  std::size_t params_ = 0;
  std::vector<double> log_prior_;
  std::vector<double> prior_;
  // [support symbol][param]
  std::vector<double> train_;
  // [test cell][param]
  std::vector<double> test_probs_;
  std::vector<bool> test_live_;
};

// Per-cell decomposition q_W(cell) = sum_p m_p(cell) * theta_W(y(cell) | p),
// where p is the feature parity.
struct LatentCell {
  int label = 0;
  std::array<double, 2> log_m{kLogZero, kLogZero};
};

std::vector<LatentCell> LatentCells(const ProbTable& feature_law,
                                    const VariableSpec& label,
                                    const VisibleMap& map) {
  const std::vector<VariableSpec>& vars = map.visible_vars();
  const std::size_t label_pos = PositionOf(vars, label.name);
  std::vector<LatentCell> cells(map.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c].label = DigitOf(vars, label_pos, c);
  }
  const auto lf = feature_law.logmass();
  std::vector<double> pseudo(lf.size() * 2);
  std::vector<double> image(map.size());
  for (int parity = 0; parity < 2; ++parity) {
    for (int y = 0; y < 2; ++y) {
      std::fill(pseudo.begin(), pseudo.end(), 0.0);
      for (std::size_t x = 0; x < lf.size(); ++x) {
        if ((std::popcount(x) & 1) == parity) {
          pseudo[2 * x + y] = std::exp(lf[x]);
        }
      }
      map.Apply(pseudo, image);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].label == y) cells[c].log_m[parity] = SafeLog(image[c]);
      }
    }
  }
  return cells;
}

class ConjugateEvidence final : public ViewEvidence {
 public:
  ConjugateEvidence(const ProbTable& feature_law,
                    const std::vector<VariableSpec>& features,
                    const VariableSpec& label, const BetaHyper& hyper,
                    const AggregationChannel* channel, const VarSet& train,
                    const VarSet& test)
      : hyper_(hyper) {
    const VisibleMap train_map(features, label, channel, train);
    const VisibleMap test_map(features, label, channel,
                              WithLabel(test, label));
    train_vars_ = train_map.visible_vars();
    test_vars_ = test_map.visible_vars();
    test_cells_ = test_map.size();
    const auto all_train =
        LatentCells(feature_law, label, train_map);
    for (std::size_t a = 0; a < all_train.size(); ++a) {
      if (all_train[a].log_m[0] != kLogZero ||
          all_train[a].log_m[1] != kLogZero) {
        support_.push_back(a);
        train_cells_.push_back(all_train[a]);
      }
    }
    test_cells_latent_ =
        LatentCells(feature_law, label, test_map);
  }

  void LogEvidence(std::span<const int> counts,
                   std::span<double> out) const override {
    int total = 0;
    for (int c : counts) total += c;
    // Dense log-coefficients over n[y][parity], each in [0, total + 1].
    const int dim = total + 2;
    const auto flat = [dim](const std::array<std::array<int, 2>, 2>& n) {
      return ((n[0][0] * dim + n[0][1]) * dim + n[1][0]) * dim + n[1][1];
    };
    const std::size_t size = static_cast<std::size_t>(dim) * dim * dim * dim;
    std::vector<double> coef(size, kLogZero);
    coef[0] = 0.0;
    std::vector<double> next(size);
    for (std::size_t a = 0; a < counts.size(); ++a) {
      const int c = counts[a];
      if (c == 0) continue;
      const LatentCell& cell = train_cells_[a];
      std::fill(next.begin(), next.end(), kLogZero);
      for (std::size_t i = 0; i < size; ++i) {
        if (coef[i] == kLogZero) continue;
        auto n = Unflatten(i, dim);
        for (int j = 0; j <= c; ++j) {
          const double term = coef[i] + LogChoose(c, j) +
                              ScaledLog(j, cell.log_m[0]) +
                              ScaledLog(c - j, cell.log_m[1]);
          if (term == kLogZero) continue;
          auto m = n;
          m[cell.label][0] += j;
          m[cell.label][1] += c - j;
          double& slot = next[flat(m)];
          slot = infomath::LogAddExp(slot, term);
        }
      }
      coef.swap(next);
    }

    std::vector<double> terms;
    for (std::size_t t = 0; t < test_cells_; ++t) {
      const LatentCell& cell = test_cells_latent_[t];
      terms.clear();
      for (std::size_t i = 0; i < size; ++i) {
        if (coef[i] == kLogZero) continue;
        const auto n = Unflatten(i, dim);
        for (int parity = 0; parity < 2; ++parity) {
          if (cell.log_m[parity] == kLogZero) continue;
          ParityCounts pc;
          for (int y = 0; y < 2; ++y) {
            for (int p = 0; p < 2; ++p) pc.n[y][p] = n[y][p];
          }
          ++pc.n[cell.label][parity];
          terms.push_back(coef[i] + cell.log_m[parity] +
                          ConjugateLogLik(pc, hyper_));
        }
      }
      out[t] = infomath::LogSumExp(terms);
    }
  }

 private:
  static std::array<std::array<int, 2>, 2> Unflatten(std::size_t i, int dim) {
    std::array<std::array<int, 2>, 2> n{};
    n[1][1] = static_cast<int>(i % dim);
    i /= dim;
    n[1][0] = static_cast<int>(i % dim);
    i /= dim;
    n[0][1] = static_cast<int>(i % dim);
    i /= dim;
    n[0][0] = static_cast<int>(i);
    return n;
  }

  BetaHyper hyper_;
  std::vector<LatentCell> train_cells_;
  std::vector<LatentCell> test_cells_latent_;
};

}  // namespace

void BetaHyper::Validate() const {
  for (double v : {alpha1, beta1, alpha2, beta2}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("Beta hyperparameters must be positive");
    }
  }
}

void ParityModelSpec::Validate() const {
  if (agents != 2 && agents != 3) {
    throw std::invalid_argument("parity model supports 2 or 3 agents");
  }
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument("r must lie in [0, 1]");
  }
  hyper.Validate();
}

ProbTable ParityFeatureLaw(int agents, double r) {
  ParityModelSpec{agents, r, BetaHyper{}}.Validate();
  auto vars = BinaryFeatures(agents);
  std::vector<double> probs(infomath::CellCount(vars));
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) {
      const double p12 = 0.5 * (x1 == x2 ? r : 1.0 - r);
      if (agents == 2) {
        probs[2 * x1 + x2] = p12;
        continue;
      }
      for (int x3 = 0; x3 < 2; ++x3) {
        probs[4 * x1 + 2 * x2 + x3] = p12 * (x3 == x2 ? r : 1.0 - r);
      }
    }
  }
  return ProbTable::FromProbabilities(std::move(vars), probs);
}

ModelClass::ModelClass(std::vector<VariableSpec> features, VariableSpec label,
                       std::vector<std::string> param_ids,
                       std::vector<double> prior_logweights,
                       std::vector<double> cond_probs)
    : features_(std::move(features)),
      label_(std::move(label)),
      param_ids_(std::move(param_ids)),
      prior_logweights_(std::move(prior_logweights)),
      cond_probs_(std::move(cond_probs)) {
  joint_ = features_;
  joint_.push_back(label_);
  cells_ = infomath::CellCount(joint_);
  if (param_ids_.empty()) {
    throw std::invalid_argument("model class needs at least one parameter");
  }
  if (prior_logweights_.size() != param_ids_.size() ||
      cond_probs_.size() != cells_ * param_ids_.size()) {
    throw std::invalid_argument("model class arrays have inconsistent sizes");
  }
  const double prior_total = std::exp(infomath::LogSumExp(prior_logweights_));
  if (!(std::abs(prior_total - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("prior log-weights are not normalized");
  }
  for (std::size_t w = 0; w < param_ids_.size(); ++w) {
    double total = 0.0;
    for (double p : CondProbs(w)) {
      if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
      total += p;
    }
    if (!(std::abs(total - 1.0) <= kNormTolerance)) {
      throw std::invalid_argument("conditional table " + param_ids_[w] +
                                  " is not normalized");
    }
  }
}

std::span<const double> ModelClass::CondProbs(std::size_t param) const {
  return std::span<const double>(cond_probs_).subspan(param * cells_, cells_);
}

ProbTable ModelClass::CondTable(std::size_t param) const {
  return ProbTable::FromProbabilities(joint_, CondProbs(param));
}

ProbTable ModelClass::FeatureMarginal() const {
  const std::size_t label_card = label_.cardinality;
  std::vector<double> probs(cells_ / label_card, 0.0);
  for (std::size_t w = 0; w < num_params(); ++w) {
    const double prior = std::exp(prior_logweights_[w]);
    const auto cond = CondProbs(w);
    for (std::size_t c = 0; c < cells_; ++c) {
      probs[c / label_card] += prior * cond[c];
    }
  }
  return ProbTable::FromProbabilities(features_, probs);
}

ModelClass BuildParityModelQuadrature(const ParityModelSpec& spec, int nodes) {
  spec.Validate();
  if (nodes < 8) throw std::invalid_argument("quadrature needs >= 8 nodes");
  std::vector<double> t;
  std::vector<double> gl;
  GaussLegendreUnit(nodes, t, gl);
  const auto lw1 =
      BetaLogWeights(t, gl, spec.hyper.alpha1, spec.hyper.beta1);
  const auto lw2 =
      BetaLogWeights(t, gl, spec.hyper.alpha2, spec.hyper.beta2);
  std::vector<double> w(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double s = std::sin(0.5 * std::numbers::pi * t[i]);
    w[i] = s * s;
  }

  const ProbTable law = ParityFeatureLaw(spec.agents, spec.r);
  const std::size_t n = static_cast<std::size_t>(nodes);
  std::vector<std::string> ids;
  std::vector<double> prior;
  std::vector<double> cond;
  ids.reserve(n * n);
  prior.reserve(n * n);
  cond.reserve(n * n * law.size() * 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ids.push_back("q" + std::to_string(i) + "_" + std::to_string(j));
      prior.push_back(lw1[i] + lw2[j]);
      const auto block = ParityCondProbs(law, w[i], w[j]);
      cond.insert(cond.end(), block.begin(), block.end());
    }
  }
  const double total = infomath::LogSumExp(prior);
  for (double& l : prior) l -= total;
  return ModelClass(BinaryFeatures(spec.agents), BinaryLabel(),
                    std::move(ids), std::move(prior), std::move(cond));
}

ModelClass BuildParityModelOnPoints(int agents, double r,
                                    std::span<const ParityPoint> points) {
  const ProbTable law = ParityFeatureLaw(agents, r);
  std::vector<std::string> ids;
  std::vector<double> prior;
  std::vector<double> cond;
  for (const auto& pt : points) {
    if (!(pt.w1 >= 0.0 && pt.w1 <= 1.0 && pt.w2 >= 0.0 && pt.w2 <= 1.0) ||
        !(pt.weight > 0.0)) {
      throw std::invalid_argument("invalid parameter point");
    }
    ids.push_back("w(" + std::to_string(pt.w1) + "," + std::to_string(pt.w2) +
                  ")");
    prior.push_back(std::log(pt.weight));
    const auto block = ParityCondProbs(law, pt.w1, pt.w2);
    cond.insert(cond.end(), block.begin(), block.end());
  }
  if (prior.empty()) throw std::invalid_argument("no parameter points");
  const double total = infomath::LogSumExp(prior);
  for (double& l : prior) l -= total;
  return ModelClass(BinaryFeatures(agents), BinaryLabel(), std::move(ids),
                    std::move(prior), std::move(cond));
}

double ConjugateLogLik(const ParityCounts& counts, const BetaHyper& hyper) {
  for (const auto& row : counts.n) {
    for (auto v : row) {
      if (v < 0) throw std::invalid_argument("negative label count");
    }
  }
  const auto& n = counts.n;
  return LogBeta(hyper.alpha1 + n[1][0], hyper.beta1 + n[0][0]) -
         LogBeta(hyper.alpha1, hyper.beta1) +
         LogBeta(hyper.alpha2 + n[1][1], hyper.beta2 + n[0][1]) -
         LogBeta(hyper.alpha2, hyper.beta2);
}

VisibleMap::VisibleMap(const std::vector<VariableSpec>& features,
                       const VariableSpec& label,
                       const AggregationChannel* channel,
                       const VarSet& visible) {
  // Source digit slots: features 0..K-1, label K, channel output K+1.
  const std::size_t k = features.size();
  std::vector<std::size_t> slot;
  bool uses_output = false;
  for (const auto& name : visible) {
    if (std::count(visible.begin(), visible.end(), name) > 1) {
      throw std::invalid_argument("duplicate visible variable '" + name + "'");
    }
    const std::size_t pos = PositionOf(features, name);
    if (pos < k) {
      slot.push_back(pos);
      visible_.push_back(features[pos]);
    } else if (name == label.name) {
      slot.push_back(k);
      visible_.push_back(label);
    } else if (channel != nullptr && name == channel->output().name) {
      slot.push_back(k + 1);
      visible_.push_back(channel->output());
      uses_output = true;
    } else if (name == kSharedName) {
      throw std::invalid_argument(
          "shared feature requested without an aggregation channel");
    } else {
      throw std::invalid_argument("unknown visible variable '" + name + "'");
    }
  }
  if (uses_output && channel->inputs() != features) {
    throw std::invalid_argument("channel inputs do not match model features");
  }
  size_ = infomath::CellCount(visible_);

  std::vector<std::size_t> dst_stride(visible_.size(), 1);
  for (std::size_t i = visible_.size(); i-- > 1;) {
    dst_stride[i - 1] = dst_stride[i] * visible_[i].cardinality;
  }
  const std::size_t feature_cells = infomath::CellCount(features);
  const int label_card = label.cardinality;
  const int outputs = uses_output ? channel->output().cardinality : 1;
  std::vector<int> digit(k + 2, 0);
  for (std::size_t x = 0; x < feature_cells; ++x) {
    std::size_t rest = x;
    for (std::size_t i = k; i-- > 0;) {
      digit[i] = static_cast<int>(rest % features[i].cardinality);
      rest /= features[i].cardinality;
    }
    for (int y = 0; y < label_card; ++y) {
      digit[k] = y;
      for (int o = 0; o < outputs; ++o) {
        const double weight = uses_output ? channel->Prob(x, o) : 1.0;
        if (weight == 0.0) continue;
        digit[k + 1] = o;
        std::size_t dst = 0;
        for (std::size_t i = 0; i < slot.size(); ++i) {
          dst += static_cast<std::size_t>(digit[slot[i]]) * dst_stride[i];
        }
        entries_.push_back({static_cast<std::uint32_t>(x * label_card + y),
                            static_cast<std::uint32_t>(dst), weight});
      }
    }
  }
}

void VisibleMap::Apply(std::span<const double> joint,
                       std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : entries_) out[e.dst] += joint[e.src] * e.weight;
}

ProbTable PerParamVisibleTable(const ModelClass& model, std::size_t param,
                               const AggregationChannel* channel,
                               const VarSet& visible) {
  if (param >= model.num_params()) {
    throw std::out_of_range("parameter index out of range");
  }
  const VisibleMap map(model.features(), model.label(), channel, visible);
  std::vector<double> probs(map.size());
  map.Apply(model.CondProbs(param), probs);
  return ProbTable::FromProbabilities(map.visible_vars(), probs);
}

GridIntegrator::GridIntegrator(std::shared_ptr<const ModelClass> model)
    : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("null model");
}

const std::vector<VariableSpec>& GridIntegrator::features() const {
  return model_->features();
}

const VariableSpec& GridIntegrator::label() const { return model_->label(); }

ProbTable GridIntegrator::FeatureMarginal() const {
  return model_->FeatureMarginal();
}

std::unique_ptr<ViewEvidence> GridIntegrator::Prepare(
    const AggregationChannel* channel, const VarSet& train,
    const VarSet& test) const {
  CheckViewSets(model_->label(), train, test);
  return std::make_unique<GridEvidence>(*model_, channel, train, test);
}

ConjugateIntegrator::ConjugateIntegrator(const ParityModelSpec& spec)
    : spec_(spec),
      features_(BinaryFeatures(spec.agents)),
      label_(BinaryLabel()),
      feature_law_(ParityFeatureLaw(spec.agents, spec.r)) {
  spec_.Validate();
}

const std::vector<VariableSpec>& ConjugateIntegrator::features() const {
  return features_;
}

const VariableSpec& ConjugateIntegrator::label() const { return label_; }

ProbTable ConjugateIntegrator::FeatureMarginal() const { return feature_law_; }

std::unique_ptr<ViewEvidence> ConjugateIntegrator::Prepare(
    const AggregationChannel* channel, const VarSet& train,
    const VarSet& test) const {
  CheckViewSets(label_, train, test);
  return std::make_unique<ConjugateEvidence>(feature_law_, features_, label_,
                                             spec_.hyper, channel, train,
                                             test);
}

}  // namespace vflcost::bayes
