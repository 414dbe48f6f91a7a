#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vsdag {

enum class VarianceMode {
  block,    ///< non-overlapping windows; a trailing partial window is dropped
  sliding,  ///< one estimate per full window ending at each sample
};

/// Population variance (divide by N) of successive windows of `x`.
/// Throws PreconditionError for a zero window or one longer than `x`.
std::vector<double> windowed_variance(std::span<const double> x, std::size_t window,
                                      VarianceMode mode = VarianceMode::block);

/// Population variance of the whole sequence (0 for an empty one).
double variance(std::span<const double> x);

}  // namespace vsdag
