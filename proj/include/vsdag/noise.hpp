#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vsdag/transfer_operator.hpp"

namespace vsdag {

enum class NoiseKind { white, bandpass };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::bandpass;
  double band_low_hz = 70.0;
  double band_high_hz = 170.0;
  double sample_rate_hz = 2500.0;
  std::uint64_t seed = 1;
  double amplitude = 1.0;  ///< target RMS

  /// Throws PreconditionError unless 0 < low < high < fs/2 (bandpass) and
  /// amplitude >= 0.
  void validate() const;
};

/// Fourth-order band-pass realized as two second-order sections, obtained by
/// bilinear transform of a second-order Butterworth low-pass prototype.
struct BandpassDesign {
  std::array<TransferOperatord, 2> sections;
  double design_low_hz;   ///< -3 dB edges actually used
  double design_high_hz;
  double rms_gain;        ///< output RMS for unit-variance white input
  double in_band_fraction;

  TransferOperatord cascade() const { return sections[0] * sections[1]; }
};

/// Band-pass whose -3 dB edges are pulled inward (geometrically about the band
/// centre) just far enough that at least `min_in_band` of the output power of
/// white input falls in [low, high].
BandpassDesign design_bandpass(double low_hz, double high_hz, double sample_rate_hz,
                               double min_in_band = 0.96);

/// Deterministic noise: identical spec and n give identical sequences.
std::vector<double> gen_noise(const NoiseSpec& spec, std::size_t n);

}  // namespace vsdag
