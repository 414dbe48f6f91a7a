#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <initializer_list>
#include <vector>

#include "vsdag/errors.hpp"

namespace vsdag {

/// Polynomial in the delay operator q^-1:
///   p(q^-1) = p0 + p1 q^-1 + ... + pn q^-n
/// stored as the coefficient vector [p0, p1, ..., pn]. Never empty.
template <typename Scalar>
class Polynomial {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Complex = std::complex<Scalar>;

  /// The constant polynomial 1.
  Polynomial() : coeffs_(Coeffs::Ones(1)) {}

  explicit Polynomial(Coeffs coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0) throw PreconditionError("polynomial needs at least one coefficient");
  }

  Polynomial(std::initializer_list<Scalar> coeffs)
      : Polynomial(Coeffs(Eigen::Map<const Coeffs>(coeffs.begin(), Eigen::Index(coeffs.size())))) {}

  static Polynomial from_vector(const std::vector<Scalar>& c) {
    return Polynomial(Coeffs(Eigen::Map<const Coeffs>(c.data(), Eigen::Index(c.size()))));
  }

  const Coeffs& coeffs() const noexcept { return coeffs_; }
  Eigen::Index size() const noexcept { return coeffs_.size(); }
  Scalar operator[](Eigen::Index i) const { return coeffs_[i]; }

  /// Index of the last nonzero coefficient (0 for constants and for zero).
  Eigen::Index degree() const noexcept {
    for (Eigen::Index i = coeffs_.size() - 1; i > 0; --i)
      if (coeffs_[i] != Scalar(0)) return i;
    return 0;
  }

  bool is_zero() const noexcept { return (coeffs_.array() == Scalar(0)).all(); }

  /// Copy with trailing zero coefficients removed.
  Polynomial canonical() const { return Polynomial(Coeffs(coeffs_.head(degree() + 1))); }

  /// Horner evaluation at a value of q^-1.
  template <typename T>
  T evaluate(const T& q_inv) const {
    T acc = T(coeffs_[coeffs_.size() - 1]);
    for (Eigen::Index i = coeffs_.size() - 2; i >= 0; --i) acc = acc * q_inv + T(coeffs_[i]);
    return acc;
  }

  /// p(1), i.e. the sum of the coefficients (DC gain).
  Scalar value_at_one() const { return coeffs_.sum(); }

  bool operator==(const Polynomial& other) const {
    return coeffs_.size() == other.coeffs_.size() && coeffs_ == other.coeffs_;
  }

 private:
  Coeffs coeffs_;
};

using Polynomiald = Polynomial<double>;

/// Product of two polynomials (coefficient convolution).
template <typename Scalar>
Polynomial<Scalar> operator*(const Polynomial<Scalar>& a, const Polynomial<Scalar>& b) {
  typename Polynomial<Scalar>::Coeffs out =
      Polynomial<Scalar>::Coeffs::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i, b.size()) += a[i] * b.coeffs();
  return Polynomial<Scalar>(std::move(out));
}

template <typename Scalar>
Polynomial<Scalar> poly_mul(const Polynomial<Scalar>& a, const Polynomial<Scalar>& b) {
  return a * b;
}

/// Roots in the z-plane of p(z^-1), i.e. the roots of
///   p0 z^n + p1 z^(n-1) + ... + pn
/// after dropping trailing zeros. Leading zero coefficients are pure delays
/// and contribute no finite root. Computed as eigenvalues of the companion
/// matrix.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> roots(const Polynomial<Scalar>& p) {
  using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  if (p.is_zero()) throw PreconditionError("roots of the zero polynomial are undefined");
  const Polynomial<Scalar> c = p.canonical();
  Eigen::Index lead = 0;
  while (c[lead] == Scalar(0)) ++lead;
  const Eigen::Index n = c.size() - 1 - lead;
  if (n == 0) return ComplexVector(0);

  Matrix companion = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -c[lead + 1 + j] / c[lead];
  if (n > 1) companion.diagonal(-1).setOnes();

  Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw RootFindingError("companion-matrix eigenvalue iteration did not converge");
  return solver.eigenvalues();
}

/// True iff every z-plane root of p(z^-1) has modulus strictly below one.
/// Constants (degree 0) have no roots and yield true.
template <typename Scalar>
bool roots_inside_unit_circle(const Polynomial<Scalar>& p) {
  const auto r = roots(p);
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (!(std::abs(r[i]) < Scalar(1))) return false;
  return true;
}

}  // namespace vsdag
