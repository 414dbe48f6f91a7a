#pragma once

#include <string>
#include <vector>

#include "vsdag/transfer_operator.hpp"

namespace vsdag {

/// d_i = d'_i - d'_(i-1) for i = 1..nD' + 1, with d'_0 = -1 and d'_(nD'+1) = 0.
/// Equivalently (1 - q^-1) D'(q^-1) = 1 - d1 q^-1 - ... - dnD q^-nD.
std::vector<double> d_from_dprime(const std::vector<double>& d_prime);

/// Coefficients of the dynamic adaptation gain
///   C(q^-1) / D'(q^-1) = (1 + c1 q^-1 + ...) / (1 - d'1 q^-1 - ...).
/// Empty c and d_prime is the plain gradient (integral) algorithm.
class DagConfig {
 public:
  DagConfig() = default;
  DagConfig(std::vector<double> c, std::vector<double> d_prime)
      : c_(std::move(c)), d_prime_(std::move(d_prime)), d_(d_from_dprime(d_prime_)) {}

  /// The ARIMA2 family (1 + c1 q^-1 + c2 q^-2)/(1 - d'1 q^-1). Zero
  /// coefficients are kept, so the update carries the same history depth
  /// whatever the values.
  static DagConfig arima2(double c1, double c2, double d1p) { return {{c1, c2}, {d1p}}; }

  const std::vector<double>& c() const noexcept { return c_; }
  const std::vector<double>& d_prime() const noexcept { return d_prime_; }
  const std::vector<double>& d() const noexcept { return d_; }

  std::size_t nc() const noexcept { return c_.size(); }
  std::size_t nd() const noexcept { return d_.size(); }

  /// c_k, zero beyond the stored length.
  double c_at(std::size_t k) const { return k >= 1 && k <= c_.size() ? c_[k - 1] : 0.0; }
  double d_prime_at(std::size_t k) const {
    return k >= 1 && k <= d_prime_.size() ? d_prime_[k - 1] : 0.0;
  }

  /// H_DAG = C/D'.
  TransferOperatord hdag() const { return TransferOperatord::from_gain_form(c_, d_prime_); }

  /// True when C = D' = 1 after dropping zero coefficients.
  bool is_trivial() const;

 private:
  std::vector<double> c_;
  std::vector<double> d_prime_;
  std::vector<double> d_ = {1.0};
};

/// A named DAG configuration (one row of the preset table).
struct NamedDag {
  std::string name;
  DagConfig cfg;
};

/// Table presets: integral, conj_nesterov, ipd, ip, arima2.
/// Throws PreconditionError for an unknown name.
DagConfig make_preset(const std::string& name);

/// The five table presets in row order.
std::vector<NamedDag> table_presets();

}  // namespace vsdag
