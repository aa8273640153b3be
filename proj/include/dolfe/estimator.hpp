#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dolfe/likelihood.hpp"

namespace dolfe {

struct FitConfig {
  double tol_grad = 1e-8;   // sup-norm of the score
  double tol_step = 1e-10;  // sup-norm of the parameter update
  int max_iter = 100;
  std::optional<Params> init;  // defaults to all zeros
  BandwidthConfig bandwidth = BandwidthConfig::exact_match();
  int threads = 1;
};

// Dropped-cell policy: a cutoff pair below this effective weight is excluded.
inline constexpr double kMinPairWeight = 10.0;
// Parameter-norm threshold for separation suspicion.
inline constexpr double kSeparationNorm = 1e6;

struct FitResult {
  std::vector<std::string> param_names;
  Vector theta;
  Matrix vcov;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<std::pair<CutoffPair, double>> cell_counts;  // per-pair effective counts
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<double> objective_path;  // accepted values, one per Newton step
  ModelShape shape;
  bool composite = true;  // false for the pooled baseline layout

  Vector se() const { return vcov.diagonal().cwiseMax(0.0).cwiseSqrt(); }

  Params as_params() const {
    if (!composite)
      throw InvalidParameterError("pooled results do not use the normalized layout");
    return Params::from_vector(shape, theta);
  }
};

namespace detail {

struct NewtonOptions {
  double tol_grad = 1e-8;
  double tol_step = 1e-10;
  int max_iter = 100;
  int max_halvings = 30;
};

struct NewtonOutcome {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> path;  // accepted objective values, ascending by construction
};

// Solves (-H + ridge I) d = s through an eigendecomposition; names the slots
// aligned with the near-null directions when the system stays singular.
inline Vector ascent_direction(const Matrix& hess, const Vector& score,
                               const std::vector<std::string>& slot_names) {
  const Matrix a = -0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector& ev = eig.eigenvalues();
  const double emax = std::max(ev.maxCoeff(), 0.0);
  double shift = 0.0;
  if (ev.minCoeff() <= 1e-12 * std::max(emax, 1.0)) {
    shift = 1e-8 * a.diagonal().cwiseAbs().sum() / static_cast<double>(a.rows());
    if (ev.minCoeff() + shift <= 1e-14 * std::max(emax, 1.0)) {
      int worst;
      ev.minCoeff(&worst);
      const Vector dir = eig.eigenvectors().col(worst).cwiseAbs();
      std::ostringstream msg;
      msg << "Hessian singular after ridge regularization; affected slots:";
      for (int p = 0; p < dir.size(); ++p)
        if (dir[p] > 0.3) msg << ' ' << slot_names[p];
      throw SingularHessianError(msg.str());
    }
  }
  const Vector w = eig.eigenvectors().transpose() * score;
  return eig.eigenvectors() * (w.array() / (ev.array() + shift)).matrix();
}

template <typename Value, typename Score, typename Hess>
NewtonOutcome newton_maximize(Value&& value, Score&& score, Hess&& hessian, Vector x,
                              const NewtonOptions& opt,
                              const std::vector<std::string>& slot_names) {
  NewtonOutcome out;
  double f = value(x);
  out.path.push_back(f);
  Vector s = score(x);

  for (int it = 1; it <= opt.max_iter; ++it) {
    out.iterations = it;
    if (s.lpNorm<Eigen::Infinity>() <= opt.tol_grad) {
      out.iterations = it - 1;
      out.stop_reason = "gradient";
      break;
    }
    const Vector d = ascent_direction(hessian(x), s, slot_names);

    double step = 1.0;
    bool accepted = false;
    Vector x_new;
    double f_new = f;
    for (int half = 0; half <= opt.max_halvings; ++half) {
      x_new = x + step * d;
      f_new = value(x_new);
      if (std::isfinite(f_new) && f_new > f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.stop_reason = "no_ascent";
      break;
    }
    const double move = (step * d).lpNorm<Eigen::Infinity>();
    x = x_new;
    f = f_new;
    out.path.push_back(f);
    if (x.lpNorm<Eigen::Infinity>() > kSeparationNorm)
      throw SeparationError("parameter norm exceeded 1e6: separation suspected");
    s = score(x);
    if (move <= opt.tol_step) {
      out.stop_reason = "step";
      break;
    }
    if (it == opt.max_iter) out.stop_reason = "max_iter";
  }
  if (out.stop_reason.empty()) out.stop_reason = "gradient";

  out.x = std::move(x);
  out.value = f;
  // Convergence is a statement about the score, not about which rule fired.
  out.converged = s.lpNorm<Eigen::Infinity>() <= opt.tol_grad;
  return out;
}

// Index bookkeeping for parameters excluded from the update.
struct ActiveSet {
  std::vector<int> slots;

  static ActiveSet from_mask(const std::vector<bool>& mask) {
    ActiveSet a;
    for (int p = 0; p < static_cast<int>(mask.size()); ++p)
      if (mask[p]) a.slots.push_back(p);
    return a;
  }
  int dim() const { return static_cast<int>(slots.size()); }
  Vector expand(const Vector& base, const Vector& reduced) const {
    Vector full = base;
    for (int r = 0; r < dim(); ++r) full[slots[r]] = reduced[r];
    return full;
  }
  Vector reduce(const Vector& full) const {
    Vector r(dim());
    for (int i = 0; i < dim(); ++i) r[i] = full[slots[i]];
    return r;
  }
  Matrix reduce(const Matrix& full) const {
    Matrix r(dim(), dim());
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) r(i, j) = full(slots[i], slots[j]);
    return r;
  }
  Matrix pad(const Matrix& reduced, int full_dim) const {
    Matrix full = Matrix::Zero(full_dim, full_dim);
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) full(slots[i], slots[j]) = reduced(i, j);
    return full;
  }
};

inline Matrix invert_spd(const Matrix& a, const std::vector<std::string>& names,
                         const ActiveSet& active) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 1e-14 * std::max(ev.maxCoeff(), 1.0)) {
    int worst;
    ev.minCoeff(&worst);
    const Vector dir = eig.eigenvectors().col(worst).cwiseAbs();
    std::ostringstream msg;
    msg << "Hessian singular at the reported estimate; affected slots:";
    for (int p = 0; p < dir.size(); ++p)
      if (dir[p] > 0.3) msg << ' ' << names[active.slots[p]];
    throw SingularHessianError(msg.str());
  }
  return eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

// H^{-1} Omega H^{-1} / n on the active slots, zero-padded elsewhere.
inline Matrix sandwich_from_table(const CellTable& table, const Vector& theta,
                                  const ActiveSet& active,
                                  const std::vector<std::string>& names, int threads) {
  const Matrix h = active.reduce(table.hessian(theta, threads));
  const Matrix omega = active.reduce(table.score_variance(theta));
  const Matrix hinv = invert_spd(-h, names, active);
  const Matrix v = hinv * omega * hinv / table.n();
  return active.pad(0.5 * (v + v.transpose()), static_cast<int>(theta.size()));
}

struct TablePolicy {
  std::vector<std::string> warnings;
  std::vector<std::pair<CutoffPair, double>> kept_pairs;
  ActiveSet active;
};

// Applies the dropped-pair policy and the unidentified-slot exclusion.
inline TablePolicy apply_policy(CellTable& table, const Vector& init,
                                const std::vector<std::string>& names) {
  TablePolicy policy;
  const auto& pairs = table.pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double w = table.pair_weights()[p];
    if (w <= 0.0) continue;
    if (w < kMinPairWeight) {
      std::ostringstream msg;
      msg << "cutoff pair (" << pairs[p].j << "," << pairs[p].l << ") dropped: effective weight "
          << w << " below " << kMinPairWeight;
      policy.warnings.push_back(msg.str());
      table.drop_pair(static_cast<int>(p));
    } else {
      policy.kept_pairs.emplace_back(pairs[p], w);
    }
  }
  if (table.total_weight() <= 0.0)
    throw NoInformationError("all cutoff pairs fall below the minimum effective weight");

  const Vector cw = table.column_weight();
  std::vector<bool> mask(cw.size());
  for (int p = 0; p < cw.size(); ++p) {
    mask[p] = cw[p] > 0.0;
    if (!mask[p])
      policy.warnings.push_back("parameter " + names[p] +
                                " unidentified (zero design weight); held at " +
                                std::to_string(init[p]));
  }
  policy.active = ActiveSet::from_mask(mask);
  return policy;
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace detail

/// Composite conditional maximum likelihood fit by damped Newton-Raphson.
inline FitResult fit(const PanelDataset& data, const FitConfig& cfg = {}) {
  data.validate();
  if (data.spells.empty()) throw NoInformationError("dataset has no spells");
  const ModelShape& shape = data.shape;
  const std::vector<std::string> names = shape.param_names(data.covariate_names);
  const Vector init = cfg.init ? cfg.init->to_vector() : Params::zero(shape).to_vector();

  CellTable table(data, cfg.bandwidth);
  if (table.total_weight() <= 0.0)
    throw NoInformationError("no cell carries weight: no switching stayers in the data");
  detail::TablePolicy policy = detail::apply_policy(table, init, names);
  const detail::ActiveSet& active = policy.active;

  if (active.dim() == 0) {
    // every parameter is excluded: the objective is flat in the remaining space
    FitResult result;
    result.shape = shape;
    result.param_names = names;
    result.theta = init;
    result.vcov = Matrix::Zero(shape.n_params(), shape.n_params());
    result.loglik = table.loglik(init, cfg.threads);
    result.converged = true;
    result.stop_reason = "no_active_parameters";
    result.cell_counts = policy.kept_pairs;
    result.warnings = policy.warnings;
    return result;
  }

  // Assumption 2 style precheck: the pooled weighted second-moment matrix of
  // the design rows must be numerically invertible on the active slots.
  {
    const Matrix m = active.reduce(table.design_moment());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const double emax = eig.eigenvalues().maxCoeff();
    const double emin = eig.eigenvalues().minCoeff();
    if (!(emin > 0.0) || emax / emin >= 1e12) {
      int worst;
      eig.eigenvalues().minCoeff(&worst);
      const Vector dir = eig.eigenvectors().col(worst).cwiseAbs();
      std::ostringstream msg;
      msg << "insufficient design variation (condition number "
          << (emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity())
          << "); affected slots:";
      for (int p = 0; p < dir.size(); ++p)
        if (dir[p] > 0.3) msg << ' ' << names[active.slots[p]];
      throw SingularHessianError(msg.str());
    }
  }

  std::vector<std::string> active_names;
  for (int slot : active.slots) active_names.push_back(names[slot]);
  detail::NewtonOptions opt{cfg.tol_grad, cfg.tol_step, cfg.max_iter, 30};
  auto outcome = detail::newton_maximize(
      [&](const Vector& x) { return table.loglik(active.expand(init, x), cfg.threads); },
      [&](const Vector& x) { return active.reduce(table.score(active.expand(init, x), cfg.threads)); },
      [&](const Vector& x) { return active.reduce(table.hessian(active.expand(init, x), cfg.threads)); },
      active.reduce(init), opt, active_names);

  FitResult result;
  result.shape = shape;
  result.param_names = names;
  result.theta = active.expand(init, outcome.x);
  result.loglik = outcome.value;
  result.iterations = outcome.iterations;
  result.converged = outcome.converged;
  result.stop_reason = outcome.stop_reason;
  result.cell_counts = policy.kept_pairs;
  result.warnings = policy.warnings;
  result.objective_path = outcome.path;
  result.vcov = detail::sandwich_from_table(table, result.theta, active, names, cfg.threads);
  result.config_echo = {
      {"estimator", "ccmle"},
      {"kernel", cfg.bandwidth.exact
                     ? std::string("exact")
                     : (cfg.bandwidth.kernel == KernelType::gaussian ? "gaussian" : "uniform")},
      {"h", cfg.bandwidth.exact ? std::string("-") : std::to_string(cfg.bandwidth.h)},
      {"tol_grad", std::to_string(cfg.tol_grad)},
      {"tol_step", std::to_string(cfg.tol_step)},
      {"max_iter", std::to_string(cfg.max_iter)},
      {"n", std::to_string(data.spells.size())}};
  return result;
}

/// Sandwich variance H^{-1} Omega H^{-1} / n at theta_hat, with Omega the
/// variance of the per-individual composite score (cross-pair terms included).
inline Matrix sandwich_vcov(const PanelDataset& data, const Params& theta_hat,
                            const FitConfig& cfg = {}) {
  data.validate();
  const std::vector<std::string> names = data.shape.param_names(data.covariate_names);
  CellTable table(data, cfg.bandwidth);
  if (table.total_weight() <= 0.0)
    throw NoInformationError("no cell carries weight: no switching stayers in the data");
  const Vector theta = theta_hat.to_vector();
  detail::TablePolicy policy = detail::apply_policy(table, theta, names);
  return detail::sandwich_from_table(table, theta, policy.active, names, cfg.threads);
}

/// ||H + sum_jl Omega_jl|| / ||H|| (Frobenius). Near zero on well-specified
/// data at the truth, by the information equality E[H_i,jl] = -Omega_jl.
inline double information_equality_gap(const PanelDataset& data, const Params& theta,
                                       const BandwidthConfig& bandwidth) {
  CellTable table(data, bandwidth);
  const Vector t = theta.to_vector();
  const Matrix h = table.hessian(t);
  return (h + table.score_variance_within_pair(t)).norm() / h.norm();
}

struct BootstrapResult {
  std::vector<std::string> param_names;
  Vector se;
  Vector ci_low;   // 2.5 percentile
  Vector ci_high;  // 97.5 percentile
  int requested = 0;
  int converged_reps = 0;
  int dropped = 0;
  Matrix estimates;  // converged replicate estimates, one row each
};

/// Cluster bootstrap: resamples individuals with replacement, refits each
/// replicate. Replicate r is a pure function of (seed, r); non-converged
/// replicates are dropped and counted.
inline BootstrapResult bootstrap(const PanelDataset& data, const FitConfig& cfg, int reps,
                                 std::uint64_t seed, int threads = 1) {
  if (reps < 2) throw InvalidParameterError("bootstrap needs at least 2 replications");
  data.validate();
  const int n = static_cast<int>(data.spells.size());
  const int dim = data.shape.n_params();

  std::vector<std::optional<Vector>> draws(reps);
  FitConfig rep_cfg = cfg;
  rep_cfg.threads = 1;
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = Rng::substream(seed, r);
    PanelDataset replicate;
    replicate.shape = data.shape;
    replicate.covariate_names = data.covariate_names;
    replicate.covariate_kinds = data.covariate_kinds;
    replicate.spells.reserve(n);
    for (int i = 0; i < n; ++i)
      replicate.spells.push_back(data.spells[rng.uniform_int(0, n - 1)]);
    try {
      FitResult fr = fit(replicate, rep_cfg);
      if (fr.converged) draws[r] = fr.theta;
    } catch (const EstimationError&) {
      // dropped
    }
  });

  BootstrapResult out;
  out.param_names = data.shape.param_names(data.covariate_names);
  out.requested = reps;
  std::vector<Vector> kept;
  for (const auto& d : draws)
    if (d) kept.push_back(*d);
  out.converged_reps = static_cast<int>(kept.size());
  out.dropped = reps - out.converged_reps;
  if (out.dropped > reps / 5)
    throw UnreliableBootstrapError("more than 20% of bootstrap replicates failed (" +
                                   std::to_string(out.dropped) + " of " +
                                   std::to_string(reps) + ")");

  out.estimates = Matrix(out.converged_reps, dim);
  for (int r = 0; r < out.converged_reps; ++r) out.estimates.row(r) = kept[r];
  out.se = Vector(dim);
  out.ci_low = Vector(dim);
  out.ci_high = Vector(dim);
  for (int p = 0; p < dim; ++p) {
    const Vector col = out.estimates.col(p);
    const double mean = col.mean();
    out.se[p] = std::sqrt((col.array() - mean).square().sum() /
                          static_cast<double>(out.converged_reps - 1));
    std::vector<double> vals(col.data(), col.data() + col.size());
    out.ci_low[p] = detail::quantile(vals, 0.025);
    out.ci_high[p] = detail::quantile(vals, 0.975);
  }
  return out;
}

namespace detail {

// Pooled ordered logit machinery: observations (i, t), t = 1..3, index
// eta = x beta (+ rho lag), all J-1 thresholds free. Layout:
// beta_1..beta_K [, rho], gamma_2..gamma_J.
struct PooledProblem {
  struct Obs {
    int spell;
    Vector x;
    double lag;
    int y;
  };
  int n = 0;
  int K = 0;
  int J = 0;
  bool with_lag = true;
  std::vector<Obs> obs;

  int dim() const { return K + (with_lag ? 1 : 0) + (J - 1); }
  int gamma_offset() const { return K + (with_lag ? 1 : 0); }

  // dl/da, dl/db, and second derivatives of ln(Lambda(a) - Lambda(b)) for the
  // outcome band [gamma_j, gamma_{j+1}); a or b absent at the boundaries.
  template <typename G, typename H>
  double accumulate(const Vector& phi, G&& grad_out, H&& hess_out) const {
    const int g0 = gamma_offset();
    double total = 0.0;
    Vector va(dim()), vb(dim());
    for (const Obs& o : obs) {
      const double eta = o.x.dot(phi.head(K)) + (with_lag ? phi[K] * o.lag : 0.0);
      const bool has_a = o.y >= 2;       // finite lower threshold
      const bool has_b = o.y <= J - 1;   // finite upper threshold
      const double a = has_a ? eta - phi[g0 + o.y - 2] : 0.0;
      const double b = has_b ? eta - phi[g0 + o.y - 1] : 0.0;

      double logp;
      if (!has_a)
        logp = log1m_logistic(b);
      else if (!has_b)
        logp = log_logistic(a);
      else
        logp = log_logistic(a) + log1m_logistic(b) + std::log1p(-std::exp(b - a));
      total += logp;

      const double p = std::exp(logp);
      const double la = has_a ? logistic_density(a) : 0.0;
      const double lb = has_b ? logistic_density(b) : 0.0;
      const double ga = la / p;
      const double gb = -lb / p;

      va.setZero();
      vb.setZero();
      if (has_a) {
        va.head(K) = o.x;
        if (with_lag) va[K] = o.lag;
        va[g0 + o.y - 2] = -1.0;
      }
      if (has_b) {
        vb.head(K) = o.x;
        if (with_lag) vb[K] = o.lag;
        vb[g0 + o.y - 1] = -1.0;
      }
      grad_out(o.spell, ga, va, gb, vb);

      const double dla = has_a ? la * (1.0 - 2.0 * logistic(a)) : 0.0;
      const double dlb = has_b ? lb * (1.0 - 2.0 * logistic(b)) : 0.0;
      const double haa = dla / p - ga * ga;
      const double hbb = -dlb / p - gb * gb;
      const double hab = la * lb / (p * p);
      hess_out(haa, va, hab, hbb, vb);
    }
    return total;
  }

  double value(const Vector& phi) const {
    return accumulate(
               phi, [](int, double, const Vector&, double, const Vector&) {},
               [](double, const Vector&, double, double, const Vector&) {}) /
           n;
  }
  Vector score(const Vector& phi) const {
    Vector s = Vector::Zero(dim());
    accumulate(
        phi,
        [&](int, double ga, const Vector& va, double gb, const Vector& vb) {
          s.noalias() += ga * va + gb * vb;
        },
        [](double, const Vector&, double, double, const Vector&) {});
    return s / n;
  }
  Matrix hessian(const Vector& phi) const {
    Matrix h = Matrix::Zero(dim(), dim());
    accumulate(
        phi, [](int, double, const Vector&, double, const Vector&) {},
        [&](double haa, const Vector& va, double hab, double hbb, const Vector& vb) {
          h.noalias() += haa * (va * va.transpose()) + hbb * (vb * vb.transpose()) +
                         hab * (va * vb.transpose() + vb * va.transpose());
        });
    return h / n;
  }
  Matrix individual_scores(const Vector& phi) const {
    Matrix s = Matrix::Zero(n, dim());
    accumulate(
        phi,
        [&](int spell, double ga, const Vector& va, double gb, const Vector& vb) {
          s.row(spell) += (ga * va + gb * vb).transpose();
        },
        [](double, const Vector&, double, double, const Vector&) {});
    return s;
  }
};

}  // namespace detail

/// Pooled dynamic ordered logit baseline (no fixed effects): MLE over
/// t = 1,2,3 with optional lag regressor 1{Y_{t-1} >= k} and all J-1
/// thresholds estimated. Cluster sandwich variance at the individual level.
inline FitResult fit_pooled(const PanelDataset& data, bool with_lag,
                            const FitConfig& cfg = {}) {
  data.validate();
  if (data.spells.empty()) throw NoInformationError("dataset has no spells");
  const int J = data.shape.num_categories;
  const int K = data.shape.num_covariates;
  const int k = data.shape.lag_cutoff;

  detail::PooledProblem prob;
  prob.n = static_cast<int>(data.spells.size());
  prob.K = K;
  prob.J = J;
  prob.with_lag = with_lag;
  std::vector<double> counts(J, 0.0);
  for (int i = 0; i < prob.n; ++i) {
    const Spell& s = data.spells[i];
    for (int t = 1; t <= 3; ++t) {
      prob.obs.push_back(
          {i, s.x.row(t - 1), static_cast<double>(indicator(s.y[t - 1], k)), s.y[t]});
      counts[s.y[t] - 1] += 1.0;
    }
  }
  const double n_obs = static_cast<double>(prob.obs.size());
  int distinct = 0;
  for (double c : counts) distinct += c > 0.0 ? 1 : 0;
  if (distinct < 2)
    throw NoInformationError("pooled fit needs at least two observed outcome categories");

  // Start at the no-regressor MLE of the thresholds: gamma_j = logit of the
  // cumulative frequency below j, nudged apart when categories are empty.
  Vector phi = Vector::Zero(prob.dim());
  double cum = 0.0;
  for (int j = 2; j <= J; ++j) {
    cum += counts[j - 2];
    const double f = std::min(std::max(cum / n_obs, 1e-6), 1.0 - 1e-6);
    double g = logit(f);
    const int slot = prob.gamma_offset() + j - 2;
    if (j > 2 && g <= phi[slot - 1] + 1e-6) g = phi[slot - 1] + 1e-6;
    phi[slot] = g;
  }

  std::vector<std::string> names;
  for (int m = 0; m < K; ++m)
    names.push_back("beta[" + (m < static_cast<int>(data.covariate_names.size())
                                   ? data.covariate_names[m]
                                   : "x" + std::to_string(m + 1)) +
                    "]");
  if (with_lag) names.push_back("rho");
  for (int j = 2; j <= J; ++j) names.push_back("gamma_" + std::to_string(j));

  detail::NewtonOptions opt{cfg.tol_grad, cfg.tol_step, cfg.max_iter, 30};
  auto outcome = detail::newton_maximize(
      [&](const Vector& x) { return prob.value(x); },
      [&](const Vector& x) { return prob.score(x); },
      [&](const Vector& x) { return prob.hessian(x); }, phi, opt, names);

  FitResult result;
  result.shape = data.shape;
  result.composite = false;
  result.param_names = names;
  result.theta = outcome.x;
  result.loglik = outcome.value;
  result.iterations = outcome.iterations;
  result.converged = outcome.converged;
  result.stop_reason = outcome.stop_reason;
  result.objective_path = outcome.path;

  for (int j = 3; j <= J; ++j) {
    const int slot = prob.gamma_offset() + j - 2;
    if (result.theta[slot] <= result.theta[slot - 1]) {
      result.warnings.push_back("fitted thresholds not strictly increasing at gamma_" +
                                std::to_string(j));
    }
  }

  std::vector<bool> mask(prob.dim(), true);
  detail::ActiveSet all = detail::ActiveSet::from_mask(mask);
  const Matrix h = prob.hessian(result.theta);
  const Matrix scores = prob.individual_scores(result.theta);
  const Matrix omega = (scores.transpose() * scores) / prob.n;
  const Matrix hinv = detail::invert_spd(-h, names, all);
  const Matrix v = hinv * omega * hinv / prob.n;
  result.vcov = 0.5 * (v + v.transpose());
  result.config_echo = {{"estimator", with_lag ? "pooled-lag" : "pooled"},
                        {"tol_grad", std::to_string(cfg.tol_grad)},
                        {"n", std::to_string(prob.n)}};
  return result;
}

/// Threshold-relative magnitudes: -rho/gamma_j below the cutoff, rho/gamma_l
/// above it, and each beta coefficient relative to rho.
struct RatioReport {
  struct Entry {
    std::string label;
    double value = 0.0;
    bool defined = true;
  };
  std::vector<Entry> entries;
};

inline RatioReport interpret(const Params& theta, const ModelShape& shape,
                             const std::vector<std::string>& covariate_names = {}) {
  const auto ratio = [](double num, double den) -> std::pair<double, bool> {
    if (num == 0.0) return {0.0, true};
    if (den == 0.0) return {0.0, false};
    return {num / den, true};
  };
  RatioReport report;
  const Vector full = theta.full_gamma(shape);
  for (int j = 2; j < shape.lag_cutoff; ++j) {
    auto [v, ok] = ratio(-theta.rho, full[j - 2]);
    report.entries.push_back({"-rho/gamma_" + std::to_string(j), v, ok});
  }
  for (int l = shape.lag_cutoff + 1; l <= shape.num_categories; ++l) {
    auto [v, ok] = ratio(theta.rho, full[l - 2]);
    report.entries.push_back({"rho/gamma_" + std::to_string(l), v, ok});
  }
  for (int m = 0; m < shape.num_covariates; ++m) {
    const std::string nm = m < static_cast<int>(covariate_names.size())
                               ? covariate_names[m]
                               : "x" + std::to_string(m + 1);
    auto [v, ok] = ratio(theta.beta[m], theta.rho);
    report.entries.push_back({"beta[" + nm + "]/rho", v, ok});
  }
  return report;
}

}  // namespace dolfe
