#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "vsdag/errors.hpp"
#include "vsdag/polynomial.hpp"

namespace vsdag {

/// Rational operator B(q^-1)/A(q^-1) with a delay-line state.
///
/// Both polynomials hold plain coefficients: a denominator stored as
/// [1, a1, ..., am] means 1 + a1 q^-1 + ... + am q^-m. Filters written in the
/// adaptation-gain form 1 - d1 q^-1 - ... therefore store [1, -d1, ...];
/// use from_gain_form() to build them from the d coefficients directly.
/// The constructor scales both polynomials so that a0 == 1 exactly.
template <typename Scalar>
class TransferOperator {
 public:
  using Poly = Polynomial<Scalar>;
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Identity operator.
  TransferOperator() : TransferOperator(Poly{Scalar(1)}, Poly{Scalar(1)}) {}

  TransferOperator(Poly numerator, Poly denominator)
      : num_(std::move(numerator)), den_(std::move(denominator)) {
    const Scalar a0 = den_[0];
    if (a0 == Scalar(0)) throw PreconditionError("denominator leading coefficient must be nonzero");
    if (a0 != Scalar(1)) {
      num_ = Poly(typename Poly::Coeffs(num_.coeffs() / a0));
      den_ = Poly(typename Poly::Coeffs(den_.coeffs() / a0));
    }
    state_ = Vector::Zero(std::max(num_.degree(), den_.degree()));
  }

  /// FIR operator b0 + b1 q^-1 + ...
  static TransferOperator fir(Poly numerator) { return {std::move(numerator), Poly{Scalar(1)}}; }

  /// (1 + c1 q^-1 + ... + cn q^-n) / (1 - d1 q^-1 - ... - dm q^-m)
  static TransferOperator from_gain_form(std::span<const Scalar> c, std::span<const Scalar> d) {
    typename Poly::Coeffs num(Eigen::Index(c.size()) + 1), den(Eigen::Index(d.size()) + 1);
    num[0] = Scalar(1);
    den[0] = Scalar(1);
    for (std::size_t i = 0; i < c.size(); ++i) num[Eigen::Index(i) + 1] = c[i];
    for (std::size_t i = 0; i < d.size(); ++i) den[Eigen::Index(i) + 1] = -d[i];
    return {Poly(std::move(num)), Poly(std::move(den))};
  }

  const Poly& numerator() const noexcept { return num_; }
  const Poly& denominator() const noexcept { return den_; }
  const Vector& state() const noexcept { return state_; }

  /// H(e^{-i omega}) = B(e^{-i omega}) / A(e^{-i omega}).
  Complex freq_response(Scalar omega) const { return at(std::polar(Scalar(1), -omega)); }

  /// H evaluated at a given value of q^-1 (z^-1).
  Complex at(Complex q_inv) const {
    const Complex a = den_.template evaluate<Complex>(q_inv);
    if (a == Complex(0))
      throw SingularityError("transfer operator evaluated on a pole");
    return num_.template evaluate<Complex>(q_inv) / a;
  }

  /// One sample of the difference equation (transposed direct form II).
  Scalar step(Scalar input) {
    const Eigen::Index n = state_.size();
    const Scalar out = num_[0] * input + (n > 0 ? state_[0] : Scalar(0));
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar next = i + 1 < n ? state_[i + 1] : Scalar(0);
      if (i + 1 < num_.size()) next += num_[i + 1] * input;
      if (i + 1 < den_.size()) next -= den_[i + 1] * out;
      state_[i] = next;
    }
    return out;
  }

  /// Filters a whole sequence, continuing from the current state.
  std::vector<Scalar> filter(std::span<const Scalar> input) {
    std::vector<Scalar> out(input.size());
    std::transform(input.begin(), input.end(), out.begin(), [this](Scalar x) { return step(x); });
    return out;
  }

  void reset() { state_.setZero(); }

  /// True if numerator and denominator are the constant 1.
  bool is_identity() const {
    return num_.degree() == 0 && den_.degree() == 0 && num_[0] == Scalar(1);
  }

 private:
  Poly num_;
  Poly den_;
  Vector state_;
};

using TransferOperatord = TransferOperator<double>;

/// Cascade of two operators (state is not carried over).
template <typename Scalar>
TransferOperator<Scalar> operator*(const TransferOperator<Scalar>& a,
                                   const TransferOperator<Scalar>& b) {
  return {a.numerator() * b.numerator(), a.denominator() * b.denominator()};
}

template <typename Scalar>
std::complex<Scalar> freq_response(const TransferOperator<Scalar>& h, Scalar omega) {
  return h.freq_response(omega);
}

template <typename Scalar>
Scalar filter_step(TransferOperator<Scalar>& h, Scalar input) {
  return h.step(input);
}

/// Uniform grid of `n` angular frequencies spanning [0, pi] inclusive.
template <typename Scalar = double>
std::vector<Scalar> omega_grid(std::size_t n) {
  std::vector<Scalar> w(n);
  if (n == 1) return {Scalar(0)};
  for (std::size_t k = 0; k < n; ++k)
    w[k] = std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(n - 1);
  return w;
}

}  // namespace vsdag
