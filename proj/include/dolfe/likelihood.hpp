#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dolfe/events.hpp"
#include "dolfe/parallel.hpp"

namespace dolfe {

/// Per-cell regressor row z = (dX, d0 - d3jl, 1 - d3jl, d3jl) together with
/// the global slots its threshold coefficients target. The per-cell parameter
/// theta_jl = (beta, rho, gamma_l, gamma_j); a slot of -1 marks the
/// normalized threshold gamma_k = 0, which contributes nothing.
struct DesignRow {
  Vector z;        // K+3 entries
  int slot_l = -1; // global index of gamma_l, -1 if l = k
  int slot_j = -1; // global index of gamma_j, -1 if j = k
  double weight = 0.0;
  int d1 = 0;

  // Embedding into the global layout (beta_1..beta_K, rho, gamma_free).
  Vector embed(const ModelShape& shape) const {
    const int K = shape.num_covariates;
    Vector g = Vector::Zero(shape.n_params());
    g.head(K) = z.head(K);
    g[K] = z[K];
    if (slot_l >= 0) g[slot_l] += z[K + 1];
    if (slot_j >= 0) g[slot_j] += z[K + 2];
    return g;
  }

  // Linear index z . theta_jl with gamma_k = 0 imposed.
  double index(const Params& theta, const ModelShape& shape) const {
    const int K = shape.num_covariates;
    double u = z.head(K).dot(theta.beta) + z[K] * theta.rho;
    if (slot_l >= 0) u += z[K + 1] * theta.gamma_free[slot_l - K - 1];
    if (slot_j >= 0) u += z[K + 2] * theta.gamma_free[slot_j - K - 1];
    return u;
  }
};

inline DesignRow design_row(const CellRecord& rec, const ModelShape& shape) {
  const int K = shape.num_covariates;
  DesignRow row;
  row.z = Vector(K + 3);
  row.z.head(K) = rec.dx;
  row.z[K] = static_cast<double>(rec.d0 - rec.d3jl);
  row.z[K + 1] = static_cast<double>(1 - rec.d3jl);
  row.z[K + 2] = static_cast<double>(rec.d3jl);
  row.slot_l = shape.gamma_slot(rec.pair.l);
  row.slot_j = shape.gamma_slot(rec.pair.j);
  row.weight = rec.weight;
  row.d1 = rec.d1;
  return row;
}

/// weight * [d1 ln Lambda(z theta) + (1 - d1) ln(1 - Lambda(z theta))].
inline double cell_loglik(const DesignRow& row, const Params& theta,
                          const ModelShape& shape) {
  if (row.weight == 0.0) return 0.0;
  const double u = row.index(theta, shape);
  return row.weight * (row.d1 ? log_logistic(u) : log1m_logistic(u));
}

/// All weighted cells of a dataset under a bandwidth config, with the design
/// rows already embedded in the global layout. Evaluation of the composite
/// likelihood, its score, and its Hessian is a pass over these rows; the
/// summation order is fixed (spell-major) regardless of the thread count.
class CellTable {
 public:
  struct Cell {
    int spell = 0;
    int pair = 0;  // index into pairs()
    double weight = 0.0;
    int d1 = 0;
    Vector z;  // embedded, n_params() entries
  };

  CellTable(const PanelDataset& data, const BandwidthConfig& cfg)
      : shape_(data.shape), n_(static_cast<int>(data.spells.size())),
        pairs_(enumerate_cutoff_pairs(data.shape)) {
    cfg.validate();
    pair_weight_.assign(pairs_.size(), 0.0);
    for (int i = 0; i < n_; ++i) {
      for (std::size_t p = 0; p < pairs_.size(); ++p) {
        auto rec = classify(data.spells[i], pairs_[p], shape_, cfg, data.covariate_kinds);
        if (!rec) continue;
        const DesignRow row = design_row(*rec, shape_);
        cells_.push_back({i, static_cast<int>(p), row.weight, row.d1, row.embed(shape_)});
        pair_weight_[p] += row.weight;
        total_weight_ += row.weight;
      }
    }
  }

  const ModelShape& shape() const { return shape_; }
  int n() const { return n_; }
  int dim() const { return shape_.n_params(); }
  const std::vector<CutoffPair>& pairs() const { return pairs_; }
  const std::vector<Cell>& cells() const { return cells_; }
  double total_weight() const { return total_weight_; }
  const std::vector<double>& pair_weights() const { return pair_weight_; }

  // Removes every cell of the given pair (dropped-pair policy).
  void drop_pair(int pair_index) {
    std::vector<Cell> kept;
    kept.reserve(cells_.size());
    for (auto& c : cells_)
      if (c.pair != pair_index) kept.push_back(std::move(c));
    cells_ = std::move(kept);
    total_weight_ -= pair_weight_[pair_index];
    pair_weight_[pair_index] = 0.0;
  }

  // Total weighted absolute regressor mass per global slot; a slot with zero
  // column weight cannot be identified from these cells.
  Vector column_weight() const {
    Vector cw = Vector::Zero(dim());
    for (const auto& c : cells_) cw += c.weight * c.z.cwiseAbs();
    return cw;
  }

  // Pooled weighted second-moment matrix of the embedded design rows.
  Matrix design_moment() const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (const auto& c : cells_) m.noalias() += c.weight * (c.z * c.z.transpose());
    return m;
  }

  double loglik(const Vector& theta, int threads = 1) const {
    require_information();
    return chunked_reduce<double>(
        cells_.size(), kChunk, threads, 0.0,
        [&](std::size_t b, std::size_t e) {
          double acc = 0.0;
          for (std::size_t r = b; r < e; ++r) {
            const Cell& c = cells_[r];
            const double u = c.z.dot(theta);
            acc += c.weight * (c.d1 ? log_logistic(u) : log1m_logistic(u));
          }
          return acc;
        },
        [](double& t, double v) { t += v; }) / n_;
  }

  Vector score(const Vector& theta, int threads = 1) const {
    require_information();
    const Vector zero = Vector::Zero(dim());
    return chunked_reduce<Vector>(
        cells_.size(), kChunk, threads, zero,
        [&](std::size_t b, std::size_t e) {
          Vector acc = Vector::Zero(dim());
          for (std::size_t r = b; r < e; ++r) {
            const Cell& c = cells_[r];
            acc.noalias() += c.weight * (c.d1 - logistic(c.z.dot(theta))) * c.z;
          }
          return acc;
        },
        [](Vector& t, const Vector& v) { t += v; }) / n_;
  }

  Matrix hessian(const Vector& theta, int threads = 1) const {
    require_information();
    const Matrix zero = Matrix::Zero(dim(), dim());
    Matrix h = chunked_reduce<Matrix>(
        cells_.size(), kChunk, threads, zero,
        [&](std::size_t b, std::size_t e) {
          Matrix acc = Matrix::Zero(dim(), dim());
          for (std::size_t r = b; r < e; ++r) {
            const Cell& c = cells_[r];
            acc.noalias() -=
                c.weight * logistic_density(c.z.dot(theta)) * (c.z * c.z.transpose());
          }
          return acc;
        },
        [](Matrix& t, const Matrix& m) { t += m; });
    return h / n_;
  }

  // Per-individual total scores (rows), summed over pairs, not 1/n scaled.
  Matrix individual_scores(const Vector& theta) const {
    require_information();
    Matrix s = Matrix::Zero(n_, dim());
    for (const auto& c : cells_)
      s.row(c.spell) += c.weight * (c.d1 - logistic(c.z.dot(theta))) * c.z.transpose();
    return s;
  }

  // Omega-hat = (1/n) sum_i s_i s_i', the variance of the per-individual
  // composite score including cross-pair terms.
  Matrix score_variance(const Vector& theta) const {
    const Matrix s = individual_scores(theta);
    return (s.transpose() * s) / n_;
  }

  // sum over pairs of Omega_jl-hat: per-pair score outer products only, no
  // cross-pair terms. Used by the information-equality diagnostic.
  Matrix score_variance_within_pair(const Vector& theta) const {
    require_information();
    Matrix m = Matrix::Zero(dim(), dim());
    for (const auto& c : cells_) {
      const double g = c.weight * (c.d1 - logistic(c.z.dot(theta)));
      m.noalias() += g * g * (c.z * c.z.transpose());
    }
    return m / n_;
  }

 private:
  void require_information() const {
    if (total_weight_ <= 0.0)
      throw NoInformationError("no cell carries weight: no switching stayers in the data");
  }

  static constexpr std::size_t kChunk = 2048;
  ModelShape shape_;
  int n_;
  std::vector<CutoffPair> pairs_;
  std::vector<Cell> cells_;
  std::vector<double> pair_weight_;
  double total_weight_ = 0.0;
};

/// Composite conditional log-likelihood: mean over individuals of the sum of
/// cell contributions over all cutoff pairs.
inline double composite_loglik(const PanelDataset& data, const Params& theta,
                               const BandwidthConfig& cfg) {
  return CellTable(data, cfg).loglik(theta.to_vector());
}

/// Gradient with respect to the global layout (beta, rho, gamma_free).
inline Vector composite_score(const PanelDataset& data, const Params& theta,
                              const BandwidthConfig& cfg) {
  return CellTable(data, cfg).score(theta.to_vector());
}

/// Hessian with respect to the global layout; negative semidefinite.
inline Matrix composite_hessian(const PanelDataset& data, const Params& theta,
                                const BandwidthConfig& cfg) {
  return CellTable(data, cfg).hessian(theta.to_vector());
}

}  // namespace dolfe
