#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dolfe/core.hpp"

namespace dolfe {

/// One admissible cutoff pair (j, l) with 2 <= j <= k <= l <= J.
struct CutoffPair {
  int j = 2;
  int l = 2;
  bool operator==(const CutoffPair&) const = default;
};

/// All admissible pairs in lexicographic order.
inline std::vector<CutoffPair> enumerate_cutoff_pairs(const ModelShape& shape) {
  shape.validate();
  std::vector<CutoffPair> pairs;
  for (int j = 2; j <= shape.lag_cutoff; ++j)
    for (int l = shape.lag_cutoff; l <= shape.num_categories; ++l)
      pairs.push_back({j, l});
  return pairs;
}

enum class KernelType { gaussian, uniform };

/// Stayer weighting: exact indicator 1{X_2 = X_3}, or a product kernel over
/// continuous covariates with bandwidth h (discrete components always exact).
struct BandwidthConfig {
  bool exact = true;
  KernelType kernel = KernelType::gaussian;
  double h = 1.0;

  static BandwidthConfig exact_match() { return {}; }
  static BandwidthConfig gaussian(double h) { return {false, KernelType::gaussian, h}; }
  static BandwidthConfig uniform(double h) { return {false, KernelType::uniform, h}; }

  void validate() const {
    if (!exact && !(h > 0.0))
      throw InvalidParameterError("bandwidth h must be positive in kernel mode");
  }
};

/// One individual's contribution to one cutoff pair.
struct CellRecord {
  std::string spell_id;
  CutoffPair pair;
  double weight = 0.0;  // stayer weight in [0,1]; 1 for an exact stayer
  int d1 = 0;           // D_1(k): 0 selects the A branch, 1 the B branch
  int d0 = 0;           // D_0(k)
  int d3jl = 0;         // end-period indicator D_3(j) if d1 = 0, else D_3(l)
  Vector dx;            // X_2 - X_1
};

inline double stayer_weight(const Eigen::Ref<const Vector>& x2,
                            const Eigen::Ref<const Vector>& x3,
                            const BandwidthConfig& cfg,
                            const std::vector<CovariateKind>& kinds) {
  cfg.validate();
  if (x2.size() != x3.size() || x2.size() != static_cast<Eigen::Index>(kinds.size()))
    throw InvalidParameterError("stayer_weight: mismatched covariate lengths");
  if (cfg.exact) {
    for (Eigen::Index m = 0; m < x2.size(); ++m)
      if (x2[m] != x3[m]) return 0.0;
    return 1.0;
  }
  double w = 1.0;
  for (Eigen::Index m = 0; m < x2.size(); ++m) {
    if (kinds[m] == CovariateKind::discrete) {
      if (x2[m] != x3[m]) return 0.0;
      continue;
    }
    const double u = (x2[m] - x3[m]) / cfg.h;
    if (cfg.kernel == KernelType::gaussian)
      w *= std::exp(-0.5 * u * u);
    else if (std::abs(u) > 1.0)
      return 0.0;
  }
  return w;
}

/// Membership test and record construction for one (spell, pair). Returns no
/// record when the switching condition fails or the stayer weight is zero.
inline std::optional<CellRecord> classify(const Spell& spell, const CutoffPair& pair,
                                          const ModelShape& shape,
                                          const BandwidthConfig& cfg,
                                          const std::vector<CovariateKind>& kinds) {
  const int k = shape.lag_cutoff;
  const int d1 = indicator(spell.y[1], k);
  // A branch: starts below k and moves up to at least l.
  // B branch: starts at or above k and moves below j.
  const bool switches = d1 == 0 ? indicator(spell.y[2], pair.l) == 1
                                : indicator(spell.y[2], pair.j) == 0;
  if (!switches) return std::nullopt;
  const double w = stayer_weight(spell.x.row(1), spell.x.row(2), cfg, kinds);
  if (w == 0.0) return std::nullopt;

  CellRecord rec;
  rec.spell_id = spell.id;
  rec.pair = pair;
  rec.weight = w;
  rec.d1 = d1;
  rec.d0 = indicator(spell.y[0], k);
  rec.d3jl = d1 == 0 ? indicator(spell.y[3], pair.j) : indicator(spell.y[3], pair.l);
  rec.dx = spell.x.row(1) - spell.x.row(0);
  return rec;
}

}  // namespace dolfe
