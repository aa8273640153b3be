#pragma once

// Hand-coded dynamic binary logit conditional likelihood (the J = 2 case),
// written directly from the switcher construction: an individual contributes
// when D_1 + D_2 = 1 and X_2 = X_3, and then
//   P(D_1 = 1 | switcher) = F(dX' b + r (D_0 - D_3)),
// with F the logistic CDF. Everything here is deliberately independent of
// the library implementation: its own event selection, objective,
// derivatives, and optimizer loop.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dolfe/core.hpp"

namespace hk {

struct SwitcherObs {
  Eigen::VectorXd dx;  // X_2 - X_1
  int d0 = 0;          // 1{Y_0 = 2}
  int d1 = 0;          // 1{Y_1 = 2}
  int d3 = 0;          // 1{Y_3 = 2}
};

inline double cdf(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// Selects switching stayers from raw binary spells.
inline std::vector<SwitcherObs> select_switchers(const dolfe::PanelDataset& data) {
  if (data.shape.num_categories != 2 || data.shape.lag_cutoff != 2)
    throw std::invalid_argument("HK reference needs J = 2, k = 2 data");
  std::vector<SwitcherObs> obs;
  for (const auto& spell : data.spells) {
    const int d1 = spell.y[1] == 2 ? 1 : 0;
    const int d2 = spell.y[2] == 2 ? 1 : 0;
    if (d1 + d2 != 1) continue;
    bool stayer = true;
    for (int m = 0; m < spell.x.cols(); ++m)
      stayer = stayer && spell.x(1, m) == spell.x(2, m);
    if (!stayer) continue;
    SwitcherObs o;
    o.dx = spell.x.row(1) - spell.x.row(0);
    o.d0 = spell.y[0] == 2 ? 1 : 0;
    o.d1 = d1;
    o.d3 = spell.y[3] == 2 ? 1 : 0;
    obs.push_back(std::move(o));
  }
  return obs;
}

// Mean conditional log likelihood at phi = (b, r); n is the full sample size.
inline double objective(const std::vector<SwitcherObs>& obs, int n,
                        const Eigen::VectorXd& phi) {
  const int K = static_cast<int>(phi.size()) - 1;
  double total = 0.0;
  for (const auto& o : obs) {
    const double w = o.dx.dot(phi.head(K)) + phi[K] * (o.d0 - o.d3);
    const double p = cdf(w);
    total += o.d1 ? std::log(p) : std::log1p(-p);
  }
  return total / n;
}

// Maximizer via undamped Newton on the analytic derivatives of the logistic
// log likelihood; the objective is globally concave so this converges from 0.
inline Eigen::VectorXd fit(const std::vector<SwitcherObs>& obs, int n, int K,
                           double tol = 1e-12, int max_iter = 200) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(K + 1);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(K + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (const auto& o : obs) {
      Eigen::VectorXd v(K + 1);
      v.head(K) = o.dx;
      v[K] = static_cast<double>(o.d0 - o.d3);
      const double p = cdf(v.dot(phi));
      g += (o.d1 - p) * v;
      h -= p * (1.0 - p) * (v * v.transpose());
    }
    g /= n;
    h /= n;
    const Eigen::VectorXd step = (-h).ldlt().solve(g);
    phi += step;
    if (step.lpNorm<Eigen::Infinity>() < tol) break;
  }
  return phi;
}

}  // namespace hk
