#include "vsdag/noise.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

namespace vsdag {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBurnIn = 8192;
constexpr std::size_t kPowerGrid = 1 << 15;

// Bilinear transform of b1 s / (s^2 + a1 s + a0) with s = k (1 - q^-1)/(1 + q^-1).
TransferOperatord bilinear_section(double b1, double a1, double a0, double k) {
  const Polynomiald num{b1 * k, 0.0, -b1 * k};
  const Polynomiald den{k * k + a1 * k + a0, 2.0 * a0 - 2.0 * k * k, k * k - a1 * k + a0};
  return {num, den};
}

std::array<TransferOperatord, 2> sections_for(double low_hz, double high_hz, double fs) {
  const double k = 2.0 * fs;
  const double wl = k * std::tan(kPi * low_hz / fs);
  const double wh = k * std::tan(kPi * high_hz / fs);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  // Second-order Butterworth prototype pole; its conjugate yields the mirror sections.
  const std::complex<double> p(-std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0);
  const std::complex<double> disc = std::sqrt(p * p * bw * bw - 4.0 * w0sq);
  const std::complex<double> s1 = (p * bw + disc) / 2.0;
  const std::complex<double> s2 = (p * bw - disc) / 2.0;

  return {bilinear_section(bw, -2.0 * s1.real(), std::norm(s1), k),
          bilinear_section(bw, -2.0 * s2.real(), std::norm(s2), k)};
}

struct PowerSplit {
  double in_band;
  double total;
};

// Midpoint-rule integrals of |H|^2 over [0, pi] and over the band.
PowerSplit power_split(const TransferOperatord& h, double low_hz, double high_hz, double fs) {
  const double wl = 2.0 * kPi * low_hz / fs;
  const double wh = 2.0 * kPi * high_hz / fs;
  const double dw = kPi / double(kPowerGrid);
  PowerSplit out{0.0, 0.0};
  for (std::size_t i = 0; i < kPowerGrid; ++i) {
    const double w = (double(i) + 0.5) * dw;
    const double p = std::norm(h.freq_response(w)) * dw;
    out.total += p;
    if (w >= wl && w <= wh) out.in_band += p;
  }
  return out;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(sample_rate_hz > 0.0)) throw PreconditionError("sample rate must be positive");
  if (!(amplitude >= 0.0)) throw PreconditionError("noise amplitude must be non-negative");
  if (kind == NoiseKind::bandpass &&
      !(0.0 < band_low_hz && band_low_hz < band_high_hz && band_high_hz < sample_rate_hz / 2.0))
    throw PreconditionError("band must satisfy 0 < low < high < fs/2, got [" +
                            std::to_string(band_low_hz) + ", " + std::to_string(band_high_hz) +
                            "] at fs " + std::to_string(sample_rate_hz));
}

BandpassDesign design_bandpass(double low_hz, double high_hz, double fs, double min_in_band) {
  NoiseSpec{NoiseKind::bandpass, low_hz, high_hz, fs, 0, 1.0}.validate();

  // Shrink the design bandwidth by `shrink` about the geometric centre of the
  // prewarped band; the in-band fraction grows monotonically with `shrink`.
  const double k = 2.0 * fs;
  const double wl = k * std::tan(kPi * low_hz / fs);
  const double wh = k * std::tan(kPi * high_hz / fs);
  const double w0 = std::sqrt(wl * wh);
  auto edges = [&](double shrink) {
    const double half = (wh - wl) / shrink / 2.0;
    const double lo = -half + std::sqrt(half * half + w0 * w0);
    const double hi = lo + 2.0 * half;
    return std::pair{fs / kPi * std::atan(lo / k), fs / kPi * std::atan(hi / k)};
  };
  auto fraction = [&](double shrink) {
    const auto [lo, hi] = edges(shrink);
    const auto s = sections_for(lo, hi, fs);
    const PowerSplit p = power_split(s[0] * s[1], low_hz, high_hz, fs);
    return p.in_band / p.total;
  };

  double lo = 1.0, hi = 1.0;
  while (fraction(hi) < min_in_band) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1024.0) throw PreconditionError("band-pass in-band power target unreachable");
  }
  for (int it = 0; it < 40 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fraction(mid) >= min_in_band ? hi : lo) = mid;
  }

  const auto [dlo, dhi] = edges(hi);
  auto s = sections_for(dlo, dhi, fs);
  const PowerSplit p = power_split(s[0] * s[1], low_hz, high_hz, fs);
  // (1/pi) * integral of |H|^2 over [0, pi] is the output variance for unit white input.
  return {s, dlo, dhi, std::sqrt(p.total / kPi), p.in_band / p.total};
}

std::vector<double> gen_noise(const NoiseSpec& spec, std::size_t n) {
  spec.validate();
  if (n == 0) throw PreconditionError("noise length must be positive");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);

  if (spec.kind == NoiseKind::white) {
    for (auto& v : out) v = spec.amplitude * gauss(rng);
    return out;
  }

  BandpassDesign design = design_bandpass(spec.band_low_hz, spec.band_high_hz, spec.sample_rate_hz);
  auto& [first, second] = design.sections;
  for (std::size_t i = 0; i < kBurnIn; ++i) second.step(first.step(gauss(rng)));
  const double scale = spec.amplitude / design.rms_gain;
  for (auto& v : out) v = scale * second.step(first.step(gauss(rng)));
  return out;
}

}  // namespace vsdag
