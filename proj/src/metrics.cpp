#include "vsdag/metrics.hpp"

#include <numeric>

#include "vsdag/errors.hpp"

namespace vsdag {

double variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double n = double(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / n;
}

std::vector<double> windowed_variance(std::span<const double> x, std::size_t window,
                                      VarianceMode mode) {
  if (window == 0) throw PreconditionError("variance window must be non-empty");
  if (window > x.size()) throw PreconditionError("variance window longer than the signal");

  std::vector<double> out;
  if (mode == VarianceMode::block) {
    out.reserve(x.size() / window);
    for (std::size_t start = 0; start + window <= x.size(); start += window)
      out.push_back(variance(x.subspan(start, window)));
  } else {
    out.reserve(x.size() - window + 1);
    for (std::size_t start = 0; start + window <= x.size(); ++start)
      out.push_back(variance(x.subspan(start, window)));
  }
  return out;
}

}  // namespace vsdag
