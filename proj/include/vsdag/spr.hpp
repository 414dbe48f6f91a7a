#pragma once

#include <cstddef>
#include <vector>

#include "vsdag/dag_config.hpp"
#include "vsdag/transfer_operator.hpp"

namespace vsdag {

inline constexpr std::size_t kDefaultSprGrid = 8192;
inline constexpr std::size_t kDefaultQuadPoints = 4096;
inline constexpr double kPrTolerance = 1e-9;

struct SprVerdict {
  bool is_stable = false;
  bool is_spr = false;
  double min_real_part = 0.0;
  double argmin_omega = 0.0;
};

struct PrVerdict {
  bool is_pr = false;
  double min_real_part_excluding_pole = 0.0;
  double unit_pole_residue = 0.0;
  bool unit_pole_residue_positive = false;
};

/// Stability of numerator and denominator plus the minimum of Re H(e^{-iw})
/// over `grid_size` uniform points on [0, pi]. SPR iff stable and min > 0.
SprVerdict is_spr_numeric(const TransferOperatord& h, std::size_t grid_size = kDefaultSprGrid);

enum class Lemma1Check { enforce, skip };

/// Integral over (0, pi) of log|H(e^{-iw})|, midpoint rule on `quad_points`
/// cells. Vanishes when numerator and denominator have all their zeros inside
/// the unit circle; that precondition is enforced unless `check` is skip.
double lemma1_integral(const TransferOperatord& h, std::size_t quad_points = kDefaultQuadPoints,
                       Lemma1Check check = Lemma1Check::enforce);

enum class Lemma2Form {
  /// Bounds re-derived from Re{C conj(D')} > 0 on the unit circle: the
  /// tangency bounds are d'(1 - 3 c2) +/- 2 sqrt(2 (c2 - c2^2)(1 - d'^2)) and
  /// apply while the tangency point cos(w) lies inside (-1, 1).
  exact,
  /// The closed form exactly as usually quoted, whose lower bound uses a
  /// single square-root factor and whose guards compare against 2(d' -/+ c2).
  /// Kept for comparison; it disagrees with the frequency sweep.
  as_published,
};

/// Closed-form SPR test of (1 + c1 z^-1 + c2 z^-2)/(1 - d1p z^-1).
/// Returns false when the numerator or denominator is not strictly stable.
/// Region boundaries count as not SPR.
bool arima2_spr_closed_form(double c1, double c2, double d1p, Lemma2Form form = Lemma2Form::exact);

/// Uniform axis: lo, lo + step, ..., `count` points.
struct GridAxis {
  double lo = 0.0;
  double step = 1.0;
  std::size_t count = 1;

  double at(std::size_t i) const { return lo + step * double(i); }

  /// Points lo, lo + step, ... up to hi (inclusive within half a step).
  static GridAxis from_range(double lo, double hi, double step);
  /// `count` points spanning [lo, hi] inclusive.
  static GridAxis spanning(double lo, double hi, std::size_t count);
};

/// Row-major grid of closed-form verdicts: cell (i, j) is c1 = c1_axis.at(i),
/// c2 = c2_axis.at(j) at index i * c2_axis.count + j.
struct SprGrid {
  GridAxis c1_axis;
  GridAxis c2_axis;
  std::vector<bool> spr;

  bool at(std::size_t i, std::size_t j) const { return spr[i * c2_axis.count + j]; }
};

SprGrid spr_region_grid(double d1p, const GridAxis& c1_axis, const GridAxis& c2_axis,
                        Lemma2Form form = Lemma2Form::exact);

/// H_PAA = C / ((1 - q^-1) D') with the product formed symbolically.
TransferOperatord build_hpaa(const DagConfig& cfg);

/// PR test for an operator with a simple pole at z = 1: Re H >= -kPrTolerance
/// on grid points w = pi k / grid_size, k = 2..grid_size, and a positive
/// residue at z = 1. The unit pole is deflated by synthetic division; throws
/// PreconditionError if there is no unit pole, if it is not simple, or if the
/// remaining denominator is not strictly stable.
PrVerdict is_pr_unit_pole(const TransferOperatord& h_paa, std::size_t grid_size = kDefaultSprGrid);

inline PrVerdict is_pr_unit_pole(const DagConfig& cfg, std::size_t grid_size = kDefaultSprGrid) {
  return is_pr_unit_pole(build_hpaa(cfg), grid_size);
}

}  // namespace vsdag
