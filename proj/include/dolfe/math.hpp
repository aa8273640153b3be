#pragma once

#include <cmath>

namespace dolfe {

// Standard logistic CDF, stable on both tails.
inline double logistic(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// ln(1 + e^u), guarded against overflow for large u.
inline double softplus(double u) {
  if (u > 30.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

// ln Lambda(u) and ln(1 - Lambda(u)) without cancellation at extreme indices.
inline double log_logistic(double u) { return -softplus(-u); }
inline double log1m_logistic(double u) { return -softplus(u); }

// Logistic density Lambda(u)(1 - Lambda(u)).
inline double logistic_density(double u) {
  const double p = logistic(u);
  return p * (1.0 - p);
}

// Inverse logistic CDF, ln(p / (1 - p)).
inline double logit(double p) { return std::log(p) - std::log1p(-p); }

}  // namespace dolfe
