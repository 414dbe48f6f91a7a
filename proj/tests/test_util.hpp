#pragma once

#include <complex>
#include <random>
#include <vector>

namespace testutil {

using cd = std::complex<double>;

// Coefficients of prod (1 - r_k z^-1) from roots given in the z-plane.
inline std::vector<double> poly_from_roots(const std::vector<cd>& roots) {
  std::vector<cd> p{1.0};
  for (const cd& r : roots) {
    std::vector<cd> next(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i] += p[i];
      next[i + 1] -= r * p[i];
    }
    p = next;
  }
  std::vector<double> out;
  for (const cd& v : p) out.push_back(v.real());
  return out;
}

// Random monic polynomial of degree `deg` whose roots all lie in |z| <= rmax,
// complex roots in conjugate pairs.
inline std::vector<double> random_stable_poly(std::mt19937_64& rng, int deg, double rmax) {
  std::uniform_real_distribution<double> rad(0.0, rmax), ang(0.0, 3.141592653589793);
  std::vector<cd> roots;
  while (int(roots.size()) < deg) {
    if (deg - int(roots.size()) >= 2 && rng() % 2) {
      const cd r = std::polar(rad(rng), ang(rng));
      roots.push_back(r);
      roots.push_back(std::conj(r));
    } else {
      roots.push_back((rng() % 2 ? 1.0 : -1.0) * rad(rng));
    }
  }
  return poly_from_roots(roots);
}

// Direct sum p(z^-1) = sum p_k e^{-i k w}.
inline cd eval_on_circle(const std::vector<double>& p, double w) {
  cd acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += p[k] * std::polar(1.0, -w * double(k));
  return acc;
}

// Plain convolution.
inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace testutil
