#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "dolfe/events.hpp"

namespace dolfe {

/// A fully enumerable model instance: finite covariate support, a fixed grid
/// of fixed-effect values, and an explicit initial-condition law p0. Used to
/// verify the sufficiency and identification results numerically.
struct OracleModel {
  struct SupportPoint {
    Matrix x;     // 3 x K covariate triple (X_1, X_2, X_3)
    double prob;  // population mass of this triple
  };

  ModelShape shape;
  Params theta;
  std::vector<SupportPoint> x_support;
  std::vector<double> alpha_grid = {-2.0, -1.0, 0.0, 1.0, 2.0};
  // p0(x, alpha) -> distribution over {1..J}; uniform when not set.
  std::function<Vector(const Matrix&, double)> p0;

  Vector initial_distribution(const Matrix& x, double alpha) const {
    if (p0) return p0(x, alpha);
    return Vector::Constant(shape.num_categories, 1.0 / shape.num_categories);
  }

  void validate() const {
    shape.validate();
    if (!theta.model_valid(shape))
      throw InvalidParameterError("oracle theta must be model-valid");
    if (alpha_grid.empty()) throw InvalidParameterError("alpha_grid must be nonempty");
    if (x_support.empty()) throw InvalidParameterError("x_support must be nonempty");
    double total = 0.0;
    for (const auto& sp : x_support) {
      if (sp.x.rows() != 3 || sp.x.cols() != shape.num_covariates)
        throw InvalidParameterError("support point must be a 3 x K covariate triple");
      if (!(sp.prob > 0.0)) throw InvalidParameterError("support probabilities must be positive");
      total += sp.prob;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw InvalidParameterError("support probabilities must sum to 1");
    // Enumeration budget: the oracle is a correctness tool, not a production path.
    const double paths = std::pow(shape.num_categories, 4);
    if (shape.num_categories > 5 || x_support.size() > 20 ||
        paths * x_support.size() * alpha_grid.size() > 1e5)
      throw InvalidParameterError("oracle instance too large to enumerate");
  }
};

/// Exact probability of a full outcome path (y_0..y_3) given (x, alpha).
inline double path_probability(const OracleModel& model, const Matrix& x, double alpha,
                               const std::array<int, 4>& path) {
  const int J = model.shape.num_categories;
  for (int y : path)
    if (y < 1 || y > J) throw InvalidParameterError("path outcome outside 1..J");
  const Vector gamma = model.theta.full_gamma(model.shape);
  double p = model.initial_distribution(x, alpha)[path[0] - 1];
  for (int t = 1; t <= 3; ++t) {
    const double eta = alpha + x.row(t - 1).dot(model.theta.beta) +
                       model.theta.rho * indicator(path[t - 1], model.shape.lag_cutoff);
    p *= category_probability(eta, path[t], gamma);
  }
  return p;
}

namespace detail {

template <typename Fn>
void for_each_path(int J, Fn fn) {
  std::array<int, 4> path;
  for (path[0] = 1; path[0] <= J; ++path[0])
    for (path[1] = 1; path[1] <= J; ++path[1])
      for (path[2] = 1; path[2] <= J; ++path[2])
        for (path[3] = 1; path[3] <= J; ++path[3]) fn(path);
}

inline bool in_event_a(const std::array<int, 4>& y, int k, const CutoffPair& p, int d0, int d3) {
  return indicator(y[0], k) == d0 && indicator(y[1], k) == 0 &&
         indicator(y[2], p.l) == 1 && indicator(y[3], p.j) == d3;
}
inline bool in_event_b(const std::array<int, 4>& y, int k, const CutoffPair& p, int d0, int d3) {
  return indicator(y[0], k) == d0 && indicator(y[1], k) == 1 &&
         indicator(y[2], p.j) == 0 && indicator(y[3], p.l) == d3;
}

}  // namespace detail

/// Exact P(B_{j,l} | C_{j,l}, D_0 = d0, end indicator = d3) at one covariate
/// triple and one fixed-effect value, by full path enumeration.
inline double conditional_event_probability(const OracleModel& model, const Matrix& x,
                                            double alpha, const CutoffPair& pair, int d0,
                                            int d3) {
  model.validate();
  if (pair.j < 2 || pair.j > model.shape.lag_cutoff || pair.l < model.shape.lag_cutoff ||
      pair.l > model.shape.num_categories)
    throw InvalidParameterError("cutoff pair outside 2 <= j <= k <= l <= J");
  const int k = model.shape.lag_cutoff;
  double pa = 0.0, pb = 0.0;
  detail::for_each_path(model.shape.num_categories, [&](const std::array<int, 4>& y) {
    if (detail::in_event_a(y, k, pair, d0, d3)) pa += path_probability(model, x, alpha, y);
    if (detail::in_event_b(y, k, pair, d0, d3)) pb += path_probability(model, x, alpha, y);
  });
  if (pa + pb <= 0.0)
    throw EmptyCellError("conditioning event has zero probability");
  return pb / (pa + pb);
}

namespace detail {

// Conditional expectation weights over the stayer support for one
// (pair, d0, d3) cell: mass of x times P(C and the conditioning indicators),
// averaged over the alpha grid. Any strictly positive weighting recovers the
// same moments because the conditional probability is exact at each x.
struct CellMoment {
  std::vector<double> weight;   // per stayer support point
  std::vector<double> inv_p;    // Lambda^{-1}(P(B|C)) per stayer support point
  double total = 0.0;
};

inline CellMoment cell_moment(const OracleModel& model,
                              const std::vector<int>& stayers, const CutoffPair& pair,
                              int d0, int d3) {
  const int k = model.shape.lag_cutoff;
  CellMoment m;
  for (int idx : stayers) {
    const auto& sp = model.x_support[idx];
    double pc = 0.0;
    double pb_over_pc = 0.0;
    double pa_sum = 0.0, pb_sum = 0.0;
    for (double alpha : model.alpha_grid) {
      detail::for_each_path(model.shape.num_categories, [&](const std::array<int, 4>& y) {
        if (detail::in_event_a(y, k, pair, d0, d3))
          pa_sum += path_probability(model, sp.x, alpha, y);
        if (detail::in_event_b(y, k, pair, d0, d3))
          pb_sum += path_probability(model, sp.x, alpha, y);
      });
    }
    pc = (pa_sum + pb_sum) / static_cast<double>(model.alpha_grid.size());
    if (pc <= 0.0) {
      m.weight.push_back(0.0);
      m.inv_p.push_back(0.0);
      continue;
    }
    pb_over_pc = pb_sum / (pa_sum + pb_sum);
    m.weight.push_back(sp.prob * pc);
    m.inv_p.push_back(logit(pb_over_pc));
    m.total += sp.prob * pc;
  }
  return m;
}

}  // namespace detail

/// Constructive identification: recovers (beta, rho, gamma) from exact
/// population conditional probabilities on the stayer subpopulation, step by
/// step: beta from the (k,k) cell with d0 = d3 = 0, rho from (k,k) with
/// (1,0), gamma_l from (k,l) with (0,0), gamma_j from (j,k) with (1,1).
inline Params identify_from_population(const OracleModel& model) {
  model.validate();
  const int k = model.shape.lag_cutoff;
  const int J = model.shape.num_categories;
  const int K = model.shape.num_covariates;

  std::vector<int> stayers;
  for (int i = 0; i < static_cast<int>(model.x_support.size()); ++i)
    if (model.x_support[i].x.row(1) == model.x_support[i].x.row(2)) stayers.push_back(i);
  if (stayers.empty())
    throw EmptyCellError("identification requires stayer support points (X_2 = X_3)");

  const auto dx_of = [&](int idx) -> Vector {
    return model.x_support[idx].x.row(1) - model.x_support[idx].x.row(0);
  };

  Params out;
  out.beta = Vector::Zero(K);
  out.gamma_free = Vector::Zero(J - 2);

  // beta: E[dX' dX]^{-1} E[dX' Lambda^{-1}(p_kk(X,0,0))] over the (k,k) cell.
  {
    const auto m = detail::cell_moment(model, stayers, {k, k}, 0, 0);
    if (m.total <= 0.0) throw EmptyCellError("empty (k,k) conditioning cell");
    Matrix mom = Matrix::Zero(K, K);
    Vector rhs = Vector::Zero(K);
    for (std::size_t s = 0; s < stayers.size(); ++s) {
      const Vector dx = dx_of(stayers[s]);
      mom.noalias() += m.weight[s] * (dx * dx.transpose());
      rhs.noalias() += m.weight[s] * dx * m.inv_p[s];
    }
    if (K > 0) {
      mom /= m.total;
      rhs /= m.total;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(mom);
      if (eig.eigenvalues().minCoeff() <=
          1e-12 * std::max(eig.eigenvalues().maxCoeff(), 1.0))
        throw Assumption2ViolationError(
            "design moment E[dX' dX] is singular on the stayer support");
      out.beta = eig.eigenvectors() *
                 (eig.eigenvectors().transpose() * rhs).cwiseQuotient(eig.eigenvalues());
    }
  }

  // A conditional mean of Lambda^{-1}(p) - dX beta over one cell.
  const auto cell_mean = [&](const CutoffPair& pair, int d0, int d3) {
    const auto m = detail::cell_moment(model, stayers, pair, d0, d3);
    if (m.total <= 0.0)
      throw EmptyCellError("empty conditioning cell for pair (" + std::to_string(pair.j) +
                           "," + std::to_string(pair.l) + ")");
    double acc = 0.0;
    for (std::size_t s = 0; s < stayers.size(); ++s)
      acc += m.weight[s] * (m.inv_p[s] - dx_of(stayers[s]).dot(out.beta));
    return acc / m.total;
  };

  out.rho = cell_mean({k, k}, 1, 0);
  for (int l = k + 1; l <= J; ++l)
    out.gamma_free[model.shape.gamma_slot(l) - K - 1] = cell_mean({k, l}, 0, 0);
  for (int j = 2; j < k; ++j)
    out.gamma_free[model.shape.gamma_slot(j) - K - 1] = cell_mean({j, k}, 1, 1);
  return out;
}

}  // namespace dolfe
