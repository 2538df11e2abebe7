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

// Model classes {P(X, Y | W)} with a prior over W, and the two ways of
// integrating W out: an explicit finite parameter grid (quadrature) and the
// closed-form Beta-Bernoulli route for the parity models.

#ifndef VFLCOST_BAYES_MODEL_H_
#define VFLCOST_BAYES_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vflcost/infomath.h"
#include "vflcost/privacy.h"

namespace vflcost::bayes {

using infomath::ProbTable;
using infomath::VariableSpec;
using infomath::VarSet;
using privacy::AggregationChannel;

struct BetaHyper {
  double alpha1 = 2.0;
  double beta1 = 1.5;
  double alpha2 = 1.5;
  double beta2 = 2.0;

  void Validate() const;
  friend bool operator==(const BetaHyper&, const BetaHyper&) = default;
};

// Binary features whose parity selects the label law:
// P(Y = 1 | x, W) = W1 if parity(x) = 0, W2 otherwise.
// X1, X2 agree with probability r (each agreeing pair carries r / 2); for
// three agents X3 copies X2 with probability r.
struct ParityModelSpec {
  int agents = 2;
  double r = 0.5;
  BetaHyper hyper;

  void Validate() const;
};

// Feature law P(X1..XK) of the parity model.
ProbTable ParityFeatureLaw(int agents, double r);

// A parameter point (w1, w2) with its unnormalized prior weight.
struct ParityPoint {
  double w1 = 0.5;
  double w2 = 0.5;
  double weight = 1.0;
};

// Finite model class: prior log-weights over parameter points and, per
// point, a table over (features..., label).
class ModelClass {
 public:
  // `cond_probs` is row-major: one block of CellCount(features + label)
  // probabilities per parameter point.
  ModelClass(std::vector<VariableSpec> features, VariableSpec label,
             std::vector<std::string> param_ids,
             std::vector<double> prior_logweights,
             std::vector<double> cond_probs);

  const std::vector<VariableSpec>& features() const { return features_; }
  const VariableSpec& label() const { return label_; }
  // features() followed by label().
  const std::vector<VariableSpec>& joint_variables() const { return joint_; }

  std::size_t num_params() const { return param_ids_.size(); }
  const std::string& param_id(std::size_t i) const { return param_ids_[i]; }
  std::span<const double> prior_logweights() const { return prior_logweights_; }

  std::span<const double> CondProbs(std::size_t param) const;
  ProbTable CondTable(std::size_t param) const;

  // Prior-predictive marginal over the features.
  ProbTable FeatureMarginal() const;

 private:
  std::vector<VariableSpec> features_;
  VariableSpec label_;
  std::vector<VariableSpec> joint_;
  std::size_t cells_ = 0;
  std::vector<std::string> param_ids_;
  std::vector<double> prior_logweights_;
  std::vector<double> cond_probs_;
};

// Product-Beta prior integrated on a nodes x nodes Gauss-Legendre grid.
// Nodes live on the angle t with w = sin^2(pi t / 2), which keeps the
// integrand smooth at the endpoints for half-integer shape parameters.
ModelClass BuildParityModelQuadrature(const ParityModelSpec& spec, int nodes);

// Parity model with an explicit finite prior over (w1, w2).
ModelClass BuildParityModelOnPoints(int agents, double r,
                                    std::span<const ParityPoint> points);

// Label counts n(y, parity) of a dataset.
struct ParityCounts {
  // Indexed [y][parity].
  std::array<std::array<std::int64_t, 2>, 2> n{};
};

// log E_W[ W1^n(1,0) (1-W1)^n(0,0) W2^n(1,1) (1-W2)^n(0,1) ] under the
// product-Beta prior.
double ConjugateLogLik(const ParityCounts& counts, const BetaHyper& hyper);

// Linear map from the joint (features..., label) cells, pushed through an
// optional channel, onto the cells of `visible`.
class VisibleMap {
 public:
  // `visible` names features, the label, or the channel output; the output
  // requires a channel.
  VisibleMap(const std::vector<VariableSpec>& features,
             const VariableSpec& label, const AggregationChannel* channel,
             const VarSet& visible);

  const std::vector<VariableSpec>& visible_vars() const { return visible_; }
  std::size_t size() const { return size_; }

  // out[v] = sum over joint cells mapped to v of joint[cell] * P(xhat | x).
  void Apply(std::span<const double> joint, std::span<double> out) const;

 private:
  struct Entry {
    std::uint32_t src;
    std::uint32_t dst;
    double weight;
  };
  std::vector<VariableSpec> visible_;
  std::size_t size_ = 0;
  std::vector<Entry> entries_;
};

// Marginal of P(X, Y | w) (x) P(Xhat | X) onto `visible` at one parameter.
ProbTable PerParamVisibleTable(const ModelClass& model, std::size_t param,
                               const AggregationChannel* channel,
                               const VarSet& visible);

// Parameter integration for one scheme view. Symbols are cells of the
// per-sample training table (which always contains the label); test cells
// are cells of the test table (test features plus the label).
class ViewEvidence {
 public:
  virtual ~ViewEvidence() = default;

  const std::vector<VariableSpec>& train_vars() const { return train_vars_; }
  const std::vector<VariableSpec>& test_vars() const { return test_vars_; }
  // Training symbols with positive mass under some parameter, as flat
  // indices into the training table. Count vectors range over these.
  const std::vector<std::size_t>& support() const { return support_; }
  std::size_t test_cells() const { return test_cells_; }

  // For a count vector over support(), writes
  //   log E_W[ prod_a q_W(a)^counts[a] * q_W(test cell) ]
  // for every test cell.
  virtual void LogEvidence(std::span<const int> counts,
                           std::span<double> out) const = 0;

 protected:
  std::vector<VariableSpec> train_vars_;
  std::vector<VariableSpec> test_vars_;
  std::vector<std::size_t> support_;
  std::size_t test_cells_ = 0;
};

// Backend that integrates the parameter out of per-sample laws.
class ParameterIntegrator {
 public:
  virtual ~ParameterIntegrator() = default;

  virtual const std::vector<VariableSpec>& features() const = 0;
  virtual const VariableSpec& label() const = 0;
  virtual ProbTable FeatureMarginal() const = 0;

  // `train` must contain the label; `test` must not (it is appended).
  virtual std::unique_ptr<ViewEvidence> Prepare(
      const AggregationChannel* channel, const VarSet& train,
      const VarSet& test) const = 0;
};

// Sums over the parameter points of a ModelClass.
class GridIntegrator final : public ParameterIntegrator {
 public:
  explicit GridIntegrator(std::shared_ptr<const ModelClass> model);

  const std::vector<VariableSpec>& features() const override;
  const VariableSpec& label() const override;
  ProbTable FeatureMarginal() const override;
  std::unique_ptr<ViewEvidence> Prepare(const AggregationChannel* channel,
                                        const VarSet& train,
                                        const VarSet& test) const override;

  const ModelClass& model() const { return *model_; }

 private:
  std::shared_ptr<const ModelClass> model_;
};

// Exact Beta-Bernoulli integration for the parity models.
class ConjugateIntegrator final : public ParameterIntegrator {
 public:
  explicit ConjugateIntegrator(const ParityModelSpec& spec);

  const std::vector<VariableSpec>& features() const override;
  const VariableSpec& label() const override;
  ProbTable FeatureMarginal() const override;
  std::unique_ptr<ViewEvidence> Prepare(const AggregationChannel* channel,
                                        const VarSet& train,
                                        const VarSet& test) const override;

  const ParityModelSpec& spec() const { return spec_; }

 private:
  ParityModelSpec spec_;
  std::vector<VariableSpec> features_;
  VariableSpec label_;
  ProbTable feature_law_;
};

}  // namespace vflcost::bayes

#endif  // VFLCOST_BAYES_MODEL_H_
