#include "vsdag/spr.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>

#include "vsdag/errors.hpp"

namespace vsdag {
namespace {

using Complex = std::complex<double>;

// e^{-i w} on the uniform [0, pi] grid, cached per size since sweeps reuse it.
const std::vector<Complex>& unit_circle_table(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<Complex>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> table;
  table.reserve(n);
  for (double w : omega_grid(n)) table.push_back(std::polar(1.0, -w));
  return cache.emplace(n, std::move(table)).first->second;
}

}  // namespace

std::vector<double> d_from_dprime(const std::vector<double>& d_prime) {
  const std::size_t nd = d_prime.size() + 1;
  std::vector<double> d(nd);
  for (std::size_t i = 1; i <= nd; ++i) {
    const double cur = i <= d_prime.size() ? d_prime[i - 1] : 0.0;
    const double prev = i == 1 ? -1.0 : d_prime[i - 2];
    d[i - 1] = cur - prev;
  }
  return d;
}

bool DagConfig::is_trivial() const {
  for (double v : c_)
    if (v != 0.0) return false;
  for (double v : d_prime_)
    if (v != 0.0) return false;
  return true;
}

SprVerdict is_spr_numeric(const TransferOperatord& h, std::size_t grid_size) {
  if (grid_size < 256) throw PreconditionError("SPR grid needs at least 256 points");

  SprVerdict v;
  v.is_stable = roots_inside_unit_circle(h.numerator()) && roots_inside_unit_circle(h.denominator());
  v.min_real_part = std::numeric_limits<double>::infinity();

  const auto& table = unit_circle_table(grid_size);
  const auto w = omega_grid(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    const Complex a = h.denominator().evaluate<Complex>(table[k]);
    double re;
    if (a == Complex(0.0)) {
      re = -std::numeric_limits<double>::infinity();
    } else {
      re = (h.numerator().evaluate<Complex>(table[k]) / a).real();
    }
    if (re < v.min_real_part) {
      v.min_real_part = re;
      v.argmin_omega = w[k];
    }
  }
  v.is_spr = v.is_stable && v.min_real_part > 0.0;
  return v;
}

double lemma1_integral(const TransferOperatord& h, std::size_t quad_points, Lemma1Check check) {
  if (quad_points == 0) throw PreconditionError("quadrature needs at least one point");
  if (check == Lemma1Check::enforce) {
    if (!roots_inside_unit_circle(h.numerator()))
      throw PreconditionError("numerator has zeros on or outside the unit circle");
    if (!roots_inside_unit_circle(h.denominator()))
      throw PreconditionError("denominator has zeros on or outside the unit circle");
  }
  const double step = std::numbers::pi / double(quad_points);
  double acc = 0.0;
  for (std::size_t k = 0; k < quad_points; ++k)
    acc += std::log(std::abs(h.freq_response((double(k) + 0.5) * step)));
  return acc * step;
}

bool arima2_spr_closed_form(double c1, double c2, double d1p, Lemma2Form form) {
  if (!(std::abs(d1p) < 1.0)) return false;
  // 1 + c1 z^-1 + c2 z^-2 has both zeros inside the unit circle.
  if (!(std::abs(c2) < 1.0 && std::abs(c1) < 1.0 + c2)) return false;

  if (c2 <= 0.0) return -1.0 - c2 < c1 && c1 < 1.0 + c2;

  const double r = std::sqrt(2.0 * (c2 - c2 * c2) * (1.0 - d1p * d1p));
  const double centre = d1p - 3.0 * d1p * c2;
  double hi = 1.0 + c2;
  double lo = -1.0 - c2;
  if (form == Lemma2Form::exact) {
    // Re{C conj(D')} = 2 c2 x^2 + (c1 - d'(1 + c2)) x + 1 - c1 d' - c2, x = cos w.
    // A tangency bound is active while its tangency point stays inside (-1, 1).
    const double s = 2.0 * r;
    if (s < 4.0 * c2 * (1.0 + d1p)) hi = centre + s;
    if (s < 4.0 * c2 * (1.0 - d1p)) lo = centre - s;
  } else {
    if (2.0 * (d1p - c2) < r && r < 2.0 * (d1p + c2)) hi = centre + 2.0 * r;
    if (2.0 * (d1p - c2) < -r && -r < 2.0 * (d1p + c2)) lo = centre - r;
  }
  return lo < c1 && c1 < hi;
}

GridAxis GridAxis::from_range(double lo, double hi, double step) {
  if (!(step > 0.0)) throw PreconditionError("grid step must be positive");
  if (hi < lo) throw PreconditionError("grid range is empty");
  return {lo, step, std::size_t(std::floor((hi - lo) / step + 0.5)) + 1};
}

GridAxis GridAxis::spanning(double lo, double hi, std::size_t count) {
  if (count == 0) throw PreconditionError("grid needs at least one point");
  return {lo, count > 1 ? (hi - lo) / double(count - 1) : 1.0, count};
}

SprGrid spr_region_grid(double d1p, const GridAxis& c1_axis, const GridAxis& c2_axis,
                        Lemma2Form form) {
  if (!(c1_axis.step > 0.0) || !(c2_axis.step > 0.0))
    throw PreconditionError("grid step must be positive");
  SprGrid g{c1_axis, c2_axis, std::vector<bool>(c1_axis.count * c2_axis.count)};
  for (std::size_t i = 0; i < c1_axis.count; ++i)
    for (std::size_t j = 0; j < c2_axis.count; ++j)
      g.spr[i * c2_axis.count + j] =
          arima2_spr_closed_form(c1_axis.at(i), c2_axis.at(j), d1p, form);
  return g;
}

TransferOperatord build_hpaa(const DagConfig& cfg) {
  return TransferOperatord::from_gain_form(cfg.c(), cfg.d());
}

PrVerdict is_pr_unit_pole(const TransferOperatord& h_paa, std::size_t grid_size) {
  if (grid_size < 2) throw PreconditionError("PR grid needs at least two points");
  const Polynomiald::Coeffs den = h_paa.denominator().canonical().coeffs();
  const Eigen::Index m = den.size() - 1;
  if (m == 0) throw PreconditionError("operator has no pole at z = 1");

  // Synthetic division D = (1 - q^-1) D'.
  Polynomiald::Coeffs reduced(m);
  reduced[0] = den[0];
  for (Eigen::Index k = 1; k < m; ++k) reduced[k] = den[k] + reduced[k - 1];
  const double remainder = den[m] + reduced[m - 1];
  if (std::abs(remainder) > 1e-12 * den.cwiseAbs().sum())
    throw PreconditionError("operator has no pole at z = 1");

  const Polynomiald d_prime(reduced);
  const double dp_at_one = d_prime.value_at_one();
  if (std::abs(dp_at_one) <= 1e-9 * reduced.cwiseAbs().sum())
    throw PreconditionError("pole at z = 1 is not simple");
  if (!roots_inside_unit_circle(d_prime))
    throw PreconditionError("denominator factor D' is not strictly stable");

  PrVerdict v;
  v.unit_pole_residue = h_paa.numerator().value_at_one() / dp_at_one;
  v.unit_pole_residue_positive = v.unit_pole_residue > 0.0;
  v.min_real_part_excluding_pole = std::numeric_limits<double>::infinity();
  const double step = std::numbers::pi / double(grid_size);
  for (std::size_t k = 2; k <= grid_size; ++k)
    v.min_real_part_excluding_pole =
        std::min(v.min_real_part_excluding_pole, h_paa.freq_response(step * double(k)).real());
  v.is_pr = v.unit_pole_residue_positive && v.min_real_part_excluding_pole >= -kPrTolerance;
  return v;
}

}  // namespace vsdag
