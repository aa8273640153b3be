#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dolfe/estimator.hpp"
#include "dolfe/oracle.hpp"

namespace dolfe {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

// Random model-valid parameter: thresholds spread strictly around gamma_k = 0.
inline Params random_valid_params(const ModelShape& shape, Rng& rng) {
  Params p = Params::zero(shape);
  for (int m = 0; m < shape.num_covariates; ++m) p.beta[m] = 2.0 * rng.uniform() - 1.0;
  p.rho = 2.0 * rng.uniform() - 1.0;
  const int k = shape.lag_cutoff;
  double low = 0.0, high = 0.0;
  for (int j = k - 1; j >= 2; --j) {
    low -= 0.3 + 1.2 * rng.uniform();
    p.gamma_free[shape.gamma_slot(j) - shape.num_covariates - 1] = low;
  }
  for (int l = k + 1; l <= shape.num_categories; ++l) {
    high += 0.3 + 1.2 * rng.uniform();
    p.gamma_free[shape.gamma_slot(l) - shape.num_covariates - 1] = high;
  }
  return p;
}

inline double closed_form_event_probability(const Params& theta, const ModelShape& shape,
                                            const Vector& dx, const CutoffPair& pair,
                                            int d0, int d3) {
  const Vector full = theta.full_gamma(shape);
  const double gl = full[pair.l - 2];
  const double gj = full[pair.j - 2];
  return logistic(dx.dot(theta.beta) + theta.rho * (d0 - d3) + (1 - d3) * gl + d3 * gj);
}

inline Vector fd_score(const CellTable& table, const Vector& theta, double step) {
  Vector g(theta.size());
  for (int p = 0; p < theta.size(); ++p) {
    Vector hi = theta, lo = theta;
    hi[p] += step;
    lo[p] -= step;
    g[p] = (table.loglik(hi) - table.loglik(lo)) / (2.0 * step);
  }
  return g;
}

inline Matrix fd_score_jacobian(const CellTable& table, const Vector& theta, double step) {
  Matrix h(theta.size(), theta.size());
  for (int p = 0; p < theta.size(); ++p) {
    Vector hi = theta, lo = theta;
    hi[p] += step;
    lo[p] -= step;
    h.col(p) = (table.score(hi) - table.score(lo)) / (2.0 * step);
  }
  return h;
}

inline DgpConfig default_check_dgp(const ModelShape& shape, std::uint64_t seed) {
  DgpConfig dgp;
  dgp.shape = shape;
  dgp.theta = Params::zero(shape);
  const int k = shape.lag_cutoff;
  double low = 0.0, high = 0.0;
  for (int j = k - 1; j >= 2; --j) {
    low -= 1.5;
    dgp.theta.gamma_free[shape.gamma_slot(j) - shape.num_covariates - 1] = low;
  }
  for (int l = k + 1; l <= shape.num_categories; ++l) {
    high += 1.5;
    dgp.theta.gamma_free[shape.gamma_slot(l) - shape.num_covariates - 1] = high;
  }
  for (int m = 0; m < shape.num_covariates; ++m) {
    dgp.theta.beta[m] = m % 2 == 0 ? 0.8 : -0.4;
    dgp.covariates.push_back(CovBernoulli{0.5});
  }
  dgp.theta.rho = 0.6;
  dgp.alpha = AlphaGaussian{0.0, 0.5};
  dgp.seed = seed;
  return dgp;
}

}  // namespace detail

/// The fast verification suite behind `dolfe check`: event enumeration, the
/// sufficiency and identification results on exact enumeration oracles,
/// derivative and concavity checks on simulated data, and the
/// threshold-ratio arithmetic.
inline std::vector<CheckResult> run_checks(const ModelShape& shape, std::uint64_t seed) {
  shape.validate();
  std::vector<CheckResult> results;
  const auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  };

  {  // Admissible cutoff pairs for the canonical shapes.
    const auto p43 = enumerate_cutoff_pairs({4, 0, 3});
    const std::vector<CutoffPair> want43 = {{2, 3}, {2, 4}, {3, 3}, {3, 4}};
    const auto p22 = enumerate_cutoff_pairs({2, 0, 2});
    const bool ok = p43 == want43 && p22 == std::vector<CutoffPair>{{2, 2}};
    add("cutoff_pair_enumeration", ok, ok ? "J=4,k=3 and J=2,k=2 sets exact" : "wrong pair set");
  }

  {  // Sufficiency: conditional event probabilities are free of alpha and
     // match the logistic closed form on stayers.
    ModelShape os = shape;
    os.num_covariates = 1;
    Rng rng(seed);
    double worst_gap = 0.0, worst_spread = 0.0;
    const auto pairs = enumerate_cutoff_pairs(os);
    for (int draw = 0; draw < 200; ++draw) {
      OracleModel model;
      model.shape = os;
      model.theta = detail::random_valid_params(os, rng);
      Matrix x(3, 1);
      x(0, 0) = 2.0 * rng.uniform() - 1.0;
      x(1, 0) = 2.0 * rng.uniform() - 1.0;
      x(2, 0) = x(1, 0);  // stayer
      model.x_support = {{x, 1.0}};
      const CutoffPair pair = pairs[rng.uniform_int(0, static_cast<int>(pairs.size()) - 1)];
      const int d0 = rng.uniform_int(0, 1), d3 = rng.uniform_int(0, 1);
      const double want =
          detail::closed_form_event_probability(model.theta, os, x.row(1) - x.row(0), pair, d0, d3);
      double lo = 1.0, hi = 0.0;
      for (double alpha : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double got = conditional_event_probability(model, x, alpha, pair, d0, d3);
        worst_gap = std::max(worst_gap, std::abs(got - want));
        lo = std::min(lo, got);
        hi = std::max(hi, got);
      }
      worst_spread = std::max(worst_spread, hi - lo);
    }
    std::ostringstream detail;
    detail << "max |oracle - closed form| = " << worst_gap << ", max alpha spread = "
           << worst_spread;
    add("sufficiency_event_probability", worst_gap < 1e-10 && worst_spread < 1e-10,
        detail.str());
  }

  {  // Constructive identification from exact population moments.
    ModelShape os = shape;
    os.num_covariates = 1;
    Rng rng(seed + 1);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
      OracleModel model;
      model.shape = os;
      model.theta = detail::random_valid_params(os, rng);
      Matrix x0(3, 1), x1(3, 1), x2(3, 1);
      x0 << 0, 1, 1;
      x1 << 1, 0, 0;
      x2 << 2, 2, 2;
      model.x_support = {{x0, 0.3}, {x1, 0.4}, {x2, 0.3}};
      const Params got = identify_from_population(model);
      const double gap =
          (got.to_vector() - model.theta.to_vector()).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, gap);
    }
    std::ostringstream detail;
    detail << "max recovery error = " << worst;
    add("identification_round_trip", worst < 1e-8, detail.str());
  }

  DgpConfig dgp = detail::default_check_dgp(
      {shape.num_categories, std::max(shape.num_covariates, 2), shape.lag_cutoff}, seed);
  const PanelDataset data = simulate(dgp, 500);
  const CellTable table(data, BandwidthConfig::exact_match());
  Rng rng(seed + 2);

  {  // Analytic score and Hessian against central finite differences.
    double worst_s = 0.0, worst_h = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
      const Vector theta = detail::random_valid_params(dgp.shape, rng).to_vector();
      const Vector s = table.score(theta);
      const Vector s_fd = detail::fd_score(table, theta, 1e-5);
      worst_s = std::max(worst_s, (s - s_fd).lpNorm<Eigen::Infinity>() /
                                      std::max(s_fd.lpNorm<Eigen::Infinity>(), 1e-12));
      const Matrix h = table.hessian(theta);
      const Matrix h_fd = detail::fd_score_jacobian(table, theta, 1e-5);
      worst_h = std::max(worst_h, (h - h_fd).lpNorm<Eigen::Infinity>() /
                                      std::max(h_fd.lpNorm<Eigen::Infinity>(), 1e-12));
    }
    std::ostringstream d1, d2;
    d1 << "max relative gap = " << worst_s;
    d2 << "max relative gap = " << worst_h;
    add("score_finite_difference", worst_s < 1e-6, d1.str());
    add("hessian_finite_difference", worst_h < 1e-5, d2.str());
  }

  {  // Concavity: the Hessian is negative semidefinite everywhere.
    double worst = -1.0;
    for (int draw = 0; draw < 100; ++draw) {
      const Vector theta = detail::random_valid_params(dgp.shape, rng).to_vector();
      const Matrix h = table.hessian(theta);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h + h.transpose()));
      worst = std::max(worst, eig.eigenvalues().maxCoeff());
    }
    std::ostringstream detail;
    detail << "max Hessian eigenvalue = " << worst;
    add("hessian_negative_semidefinite", worst <= 1e-10, detail.str());
  }

  {  // Threshold-ratio arithmetic on the published persistence example.
    ModelShape rs{4, 0, 3};
    Params p = Params::zero(rs);
    p.rho = 0.733;
    p.gamma_free[0] = -3.275;
    p.gamma_free[1] = 3.326;
    const RatioReport report = interpret(p, rs);
    const bool ok = std::abs(report.entries[0].value - 0.22381679389312977) < 1e-12 &&
                    std::abs(report.entries[1].value - 0.22038484666265785) < 1e-12;
    std::ostringstream detail;
    detail << "-rho/gamma_2 = " << report.entries[0].value
           << ", rho/gamma_4 = " << report.entries[1].value;
    add("threshold_ratio_arithmetic", ok, detail.str());
  }

  return results;
}

}  // namespace dolfe
