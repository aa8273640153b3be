#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dolfe/errors.hpp"
#include "dolfe/math.hpp"
#include "dolfe/rng.hpp"

namespace dolfe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Number of outcome categories J, covariate count K, and the lag cutoff k.
/// k doubles as the normalized threshold (gamma_k = 0).
struct ModelShape {
  int num_categories = 2;  // J >= 2
  int num_covariates = 0;  // K >= 0
  int lag_cutoff = 2;      // 2 <= k <= J

  void validate() const {
    if (num_categories < 2) throw InvalidParameterError("num_categories must be >= 2");
    if (num_covariates < 0) throw InvalidParameterError("num_covariates must be >= 0");
    if (lag_cutoff < 2 || lag_cutoff > num_categories)
      throw InvalidParameterError("lag_cutoff must satisfy 2 <= k <= J");
  }

  // Global parameter layout: beta_1..beta_K, rho, free thresholds ascending.
  int n_params() const { return num_covariates + 1 + (num_categories - 2); }

  // Global slot of gamma_m for m in {2..J} \ {k}; -1 for the normalized m = k.
  int gamma_slot(int m) const {
    if (m == lag_cutoff) return -1;
    const int rank = (m - 2) - (m > lag_cutoff ? 1 : 0);
    return num_covariates + 1 + rank;
  }

  std::vector<std::string> param_names(
      const std::vector<std::string>& covariate_names = {}) const {
    std::vector<std::string> names;
    for (int m = 0; m < num_covariates; ++m) {
      if (m < static_cast<int>(covariate_names.size()))
        names.push_back("beta[" + covariate_names[m] + "]");
      else
        names.push_back("beta[x" + std::to_string(m + 1) + "]");
    }
    names.push_back("rho");
    for (int j = 2; j <= num_categories; ++j)
      if (j != lag_cutoff) names.push_back("gamma_" + std::to_string(j));
    return names;
  }

  bool operator==(const ModelShape&) const = default;
};

/// Model parameters (beta, rho, gamma) with the normalization gamma_k = 0
/// built in: gamma_free holds the J-2 thresholds for j in {2..J} \ {k}.
struct Params {
  Vector beta;
  double rho = 0.0;
  Vector gamma_free;

  static Params zero(const ModelShape& shape) {
    Params p;
    p.beta = Vector::Zero(shape.num_covariates);
    p.gamma_free = Vector::Zero(shape.num_categories - 2);
    return p;
  }

  static Params from_vector(const ModelShape& shape, const Vector& theta) {
    if (theta.size() != shape.n_params())
      throw InvalidParameterError("parameter vector has wrong length");
    Params p;
    p.beta = theta.head(shape.num_covariates);
    p.rho = theta[shape.num_covariates];
    p.gamma_free = theta.tail(shape.num_categories - 2);
    return p;
  }

  Vector to_vector() const {
    Vector theta(beta.size() + 1 + gamma_free.size());
    theta << beta, rho, gamma_free;
    return theta;
  }

  // Expanded thresholds (gamma_2, ..., gamma_J) with gamma_k = 0 inserted.
  Vector full_gamma(const ModelShape& shape) const {
    if (gamma_free.size() != shape.num_categories - 2)
      throw InvalidParameterError("gamma_free must have J-2 entries");
    Vector full(shape.num_categories - 1);
    int pos = 0;
    for (int j = 2; j <= shape.num_categories; ++j)
      full[j - 2] = (j == shape.lag_cutoff) ? 0.0 : gamma_free[pos++];
    return full;
  }

  // A model-valid parameter has finite entries and strictly increasing
  // expanded thresholds; the DGP requires this, the estimator does not.
  bool model_valid(const ModelShape& shape) const {
    if (beta.size() != shape.num_covariates) return false;
    if (gamma_free.size() != shape.num_categories - 2) return false;
    if (!beta.allFinite() || !std::isfinite(rho) || !gamma_free.allFinite()) return false;
    const Vector full = full_gamma(shape);
    for (int i = 1; i < full.size(); ++i)
      if (!(full[i] > full[i - 1])) return false;
    return true;
  }
};

/// One individual's observation unit: outcomes for t = 0..3 and covariate
/// rows for t = 1..3 (period 0 is unmodelled).
struct Spell {
  std::string id;
  std::array<int, 4> y{};  // each in 1..J
  Matrix x;                // 3 x K, row r holds the covariates of period r+1
};

enum class CovariateKind { discrete, continuous };

struct PanelDataset {
  ModelShape shape;
  std::vector<Spell> spells;
  std::vector<std::string> covariate_names;
  std::vector<CovariateKind> covariate_kinds;

  void validate() const {
    shape.validate();
    if (static_cast<int>(covariate_kinds.size()) != shape.num_covariates)
      throw InvalidParameterError("covariate_kinds length must equal K");
    for (const Spell& s : spells) {
      for (int y : s.y)
        if (y < 1 || y > shape.num_categories)
          throw InvalidParameterError("outcome outside 1..J in spell " + s.id);
      if (s.x.rows() != 3 || s.x.cols() != shape.num_covariates)
        throw InvalidParameterError("covariate block must be 3 x K in spell " + s.id);
    }
  }
};

// Fixed-effect distribution for the data-generating process.
struct AlphaConstant {
  double value = 0.0;
};
struct AlphaGaussian {
  double mean = 0.0;
  double sd = 1.0;
};
// alpha_i = loading * (mean of the individual's kept covariate values) + N(0,1).
// This induces the fixed-effects/regressor correlation that separates fixed
// from random effects.
struct AlphaCovariateCorrelated {
  double loading = 1.0;
};
using AlphaScheme = std::variant<AlphaConstant, AlphaGaussian, AlphaCovariateCorrelated>;

// Per-covariate generators, drawn independently across periods.
struct CovBernoulli {
  double p = 0.5;
};
struct CovDiscreteUniform {
  int levels = 2;  // values 0..levels-1
};
struct CovGaussian {
  double mean = 0.0;
  double sd = 1.0;
};
using CovariateScheme = std::variant<CovBernoulli, CovDiscreteUniform, CovGaussian>;

inline CovariateKind kind_of(const CovariateScheme& scheme) {
  return std::holds_alternative<CovGaussian>(scheme) ? CovariateKind::continuous
                                                     : CovariateKind::discrete;
}

struct DgpConfig {
  ModelShape shape;
  Params theta;
  AlphaScheme alpha = AlphaConstant{};
  std::vector<CovariateScheme> covariates;
  int burn_in = 20;
  std::uint64_t seed = 0;
  std::vector<std::string> covariate_names;  // defaults to x1..xK

  void validate() const {
    shape.validate();
    if (!theta.model_valid(shape))
      throw InvalidParameterError("theta is not model-valid (thresholds must increase strictly)");
    if (static_cast<int>(covariates.size()) != shape.num_covariates)
      throw InvalidParameterError("covariate scheme count must equal K");
    if (burn_in < 0) throw InvalidParameterError("burn_in must be >= 0");
    for (const auto& scheme : covariates) {
      if (const auto* b = std::get_if<CovBernoulli>(&scheme)) {
        if (!(b->p > 0.0 && b->p < 1.0))
          throw InvalidParameterError("bernoulli p must lie in (0,1)");
      } else if (const auto* d = std::get_if<CovDiscreteUniform>(&scheme)) {
        if (d->levels < 1) throw InvalidParameterError("discrete_uniform needs levels >= 1");
      } else if (const auto* g = std::get_if<CovGaussian>(&scheme)) {
        if (!(g->sd >= 0.0)) throw InvalidParameterError("gaussian sd must be >= 0");
      }
    }
  }
};

/// Single-period ordered logit cell probability P(Y = j | eta) with
/// thresholds gamma_full = (gamma_2..gamma_J); gamma_1 = -inf, gamma_{J+1} = +inf.
inline double category_probability(double eta, int j, const Vector& gamma_full) {
  const int J = static_cast<int>(gamma_full.size()) + 1;
  if (j < 1 || j > J) throw InvalidParameterError("category index outside 1..J");
  for (int i = 1; i < gamma_full.size(); ++i)
    if (!(gamma_full[i] > gamma_full[i - 1]))
      throw InvalidParameterError("thresholds must be strictly increasing");
  const double upper = (j == 1) ? 1.0 : logistic(eta - gamma_full[j - 2]);
  const double lower = (j == J) ? 0.0 : logistic(eta - gamma_full[j - 1]);
  return upper - lower;
}

/// D(j) = 1{y >= j}.
inline int indicator(int y, int j) { return y >= j ? 1 : 0; }

namespace detail {

inline double draw_covariate(const CovariateScheme& scheme, Rng& rng) {
  if (const auto* b = std::get_if<CovBernoulli>(&scheme))
    return rng.uniform() < b->p ? 1.0 : 0.0;
  if (const auto* d = std::get_if<CovDiscreteUniform>(&scheme))
    return static_cast<double>(rng.uniform_int(0, d->levels - 1));
  const auto& g = std::get<CovGaussian>(scheme);
  return g.mean + g.sd * rng.normal();
}

inline int categorize(double latent, const Vector& gamma_full) {
  int y = 1;
  for (int i = 0; i < gamma_full.size(); ++i)
    if (latent >= gamma_full[i]) ++y;
  return y;
}

// One spell, a pure function of (config, spell index). Draw order is fixed:
// burn-in covariate rows, kept covariate rows, alpha, initial outcome,
// burn-in transitions, observed transitions.
inline Spell simulate_spell(const DgpConfig& config, const Vector& gamma_full,
                            std::uint64_t index) {
  Rng rng = Rng::substream(config.seed, index);
  const int K = config.shape.num_covariates;
  const int k = config.shape.lag_cutoff;

  Matrix burn(config.burn_in, K);
  for (int b = 0; b < config.burn_in; ++b)
    for (int m = 0; m < K; ++m) burn(b, m) = draw_covariate(config.covariates[m], rng);
  Matrix kept(3, K);
  for (int t = 0; t < 3; ++t)
    for (int m = 0; m < K; ++m) kept(t, m) = draw_covariate(config.covariates[m], rng);

  double alpha = 0.0;
  if (const auto* c = std::get_if<AlphaConstant>(&config.alpha)) {
    alpha = c->value;
  } else if (const auto* g = std::get_if<AlphaGaussian>(&config.alpha)) {
    alpha = g->mean + g->sd * rng.normal();
  } else {
    const auto& cc = std::get<AlphaCovariateCorrelated>(config.alpha);
    const double mean_x = K > 0 ? kept.sum() / static_cast<double>(3 * K) : 0.0;
    alpha = cc.loading * mean_x + rng.normal();
  }

  const auto step = [&](int y_prev, const auto& x_row) {
    const double eta = alpha + x_row.dot(config.theta.beta) +
                       config.theta.rho * indicator(y_prev, k);
    return categorize(eta - rng.logistic_draw(), gamma_full);
  };

  int y = rng.uniform_int(1, config.shape.num_categories);
  for (int b = 0; b < config.burn_in; ++b) y = step(y, burn.row(b));

  Spell spell;
  spell.id = "sim" + std::to_string(index + 1);
  spell.x = kept;
  spell.y[0] = y;
  for (int t = 1; t <= 3; ++t) spell.y[t] = step(spell.y[t - 1], kept.row(t - 1));
  return spell;
}

}  // namespace detail

/// Draw n spells from the model. The initial outcome is produced by burn_in
/// transitions started from a uniform draw on {1..J}; each spell uses its own
/// substream so the output is reproducible for any evaluation order.
inline PanelDataset simulate(const DgpConfig& config, int n) {
  config.validate();
  if (n < 1) throw InvalidParameterError("empty dataset: n must be >= 1");
  const Vector gamma_full = config.theta.full_gamma(config.shape);

  PanelDataset data;
  data.shape = config.shape;
  data.covariate_names = config.covariate_names;
  for (int m = static_cast<int>(data.covariate_names.size());
       m < config.shape.num_covariates; ++m)
    data.covariate_names.push_back("x" + std::to_string(m + 1));
  for (const auto& scheme : config.covariates) data.covariate_kinds.push_back(kind_of(scheme));

  data.spells.reserve(n);
  for (int i = 0; i < n; ++i)
    data.spells.push_back(detail::simulate_spell(config, gamma_full, i));
  return data;
}

}  // namespace dolfe
