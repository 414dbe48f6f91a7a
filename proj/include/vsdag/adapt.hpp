#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vsdag/dag_config.hpp"
#include "vsdag/errors.hpp"

namespace vsdag {

enum class StepKind {
  constant,    ///< LMS: mu
  normalized,  ///< NLMS: mu / (delta + phi'phi)
  posterior,   ///< PLMS: mu / (1 + mu phi'phi)
};

std::string to_string(StepKind kind);
/// Accepts lms/constant, nlms/normalized, plms/posterior.
StepKind parse_step_kind(const std::string& name);

template <typename Scalar>
struct StepSizePolicy {
  StepKind kind = StepKind::constant;
  Scalar mu = Scalar(0.1);
  Scalar delta = Scalar(1e-16);

  static StepSizePolicy constant(Scalar mu) { return {StepKind::constant, mu, Scalar(1e-16)}; }
  static StepSizePolicy normalized(Scalar mu, Scalar delta = Scalar(1e-16)) {
    return {StepKind::normalized, mu, delta};
  }
  static StepSizePolicy posterior(Scalar mu) { return {StepKind::posterior, mu, Scalar(1e-16)}; }

  void validate() const {
    if (!(mu > Scalar(0))) throw PreconditionError("step size mu must be positive");
    if (kind == StepKind::normalized && !(delta > Scalar(0)))
      throw PreconditionError("NLMS regularizer delta must be positive");
  }
};

/// mu(t) for the given regressor.
template <typename Scalar, typename Derived>
Scalar step_size(const StepSizePolicy<Scalar>& policy, const Eigen::MatrixBase<Derived>& phi) {
  switch (policy.kind) {
    case StepKind::constant:
      return policy.mu;
    case StepKind::normalized:
      return policy.mu / (policy.delta + phi.squaredNorm());
    case StepKind::posterior:
      return policy.mu / (Scalar(1) + policy.mu * phi.squaredNorm());
  }
  return policy.mu;
}

template <typename Scalar>
struct PredictionPair {
  Scalar z0_hat = Scalar(0);  ///< a-priori output theta0'(t-1) phi(t)
  Scalar e0 = Scalar(0);      ///< a-priori error
  Scalar e_post = Scalar(0);  ///< a-posteriori error x - theta'(t) phi(t)
  Scalar mu_t = Scalar(0);    ///< step size used
};

/// VS-LMS estimator whose correction term mu(t) phi(t) e0(t) is filtered by
/// the dynamic adaptation gain C/D'. The recursion actually run is
///
///   theta0(t-1) = sum_i d_i theta(t-i) + sum_k c_k g(t-k)
///   theta(t)    = theta0(t-1) + g(t),   g(t) = mu(t) phi(t) e0(t)
///
/// with e0(t) = x(t) - theta0(t-1)' phi(t). With C = D' = 1 this is plain
/// VS-LMS. All history starts at theta(0) and zero corrections.
template <typename Scalar>
class DagAdaptiveFilter {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using VectorRef = Eigen::Ref<const Vector>;

  static constexpr double kDivergenceNorm = 1e12;

  DagAdaptiveFilter(Eigen::Index n_params, StepSizePolicy<Scalar> policy, DagConfig cfg = {})
      : DagAdaptiveFilter(Vector::Zero(n_params), policy, std::move(cfg)) {}

  DagAdaptiveFilter(const Vector& theta_init, StepSizePolicy<Scalar> policy, DagConfig cfg = {})
      : policy_(policy), cfg_(std::move(cfg)) {
    if (theta_init.size() < 1) throw PreconditionError("need at least one adaptive parameter");
    policy_.validate();
    d_.resize(cfg_.nd());
    c_.resize(cfg_.nc());
    std::transform(cfg_.d().begin(), cfg_.d().end(), d_.begin(), [](double v) { return Scalar(v); });
    std::transform(cfg_.c().begin(), cfg_.c().end(), c_.begin(), [](double v) { return Scalar(v); });
    theta_hist_.assign(cfg_.nd(), theta_init);
    corr_hist_.assign(cfg_.nc(), Vector::Zero(theta_init.size()));
  }

  Eigen::Index size() const noexcept { return theta_hist_.front().size(); }
  const StepSizePolicy<Scalar>& policy() const noexcept { return policy_; }
  const DagConfig& config() const noexcept { return cfg_; }
  long steps() const noexcept { return t_; }

  /// theta(t-1), the most recent estimate.
  const Vector& estimate() const noexcept { return theta_hist_.front(); }

  /// theta0(t-1), the estimate the a-priori output is computed with.
  Vector prior_estimate() const {
    Vector out = d_[0] * theta_hist_[0];
    for (std::size_t i = 1; i < d_.size(); ++i) out += d_[i] * theta_hist_[i];
    for (std::size_t k = 0; k < c_.size(); ++k) out += c_[k] * corr_hist_[k];
    return out;
  }

  Scalar predict(const VectorRef& phi) const {
    check_size(phi);
    return prior_estimate().dot(phi);
  }

  /// One step against a desired output: e0 = x - theta0'phi, then update.
  PredictionPair<Scalar> update(const VectorRef& phi, Scalar x) {
    check_size(phi);
    Vector prior = prior_estimate();
    const Scalar z0 = prior.dot(phi);
    PredictionPair<Scalar> out = correct(std::move(prior), phi, x - z0);
    out.z0_hat = z0;
    return out;
  }

  /// One step with an externally measured a-priori error (for instance the
  /// residual of a feedforward loop) and the regressor used in the gradient.
  PredictionPair<Scalar> adapt(const VectorRef& phi, Scalar e0) {
    check_size(phi);
    return correct(prior_estimate(), phi, e0);
  }

 private:
  void check_size(const VectorRef& phi) const {
    if (phi.size() != size())
      throw PreconditionError("regressor has " + std::to_string(phi.size()) +
                              " entries, expected " + std::to_string(size()));
  }

  PredictionPair<Scalar> correct(Vector prior, const VectorRef& phi, Scalar e0) {
    PredictionPair<Scalar> out;
    out.e0 = e0;
    out.mu_t = step_size(policy_, phi);
    const Scalar energy = phi.squaredNorm();
    out.e_post = policy_.kind == StepKind::posterior
                     ? e0 / (Scalar(1) + policy_.mu * energy)
                     : e0 * (Scalar(1) - out.mu_t * energy);

    Vector g = (out.mu_t * e0) * phi;
    prior += g;

    const double norm = double(prior.norm());
    if (!std::isfinite(norm)) throw DivergenceError(t_ + 1, "non-finite parameter estimate");
    if (norm > kDivergenceNorm) throw DivergenceError(t_ + 1, "parameter estimate norm exceeded 1e12");

    std::rotate(theta_hist_.rbegin(), theta_hist_.rbegin() + 1, theta_hist_.rend());
    theta_hist_.front().swap(prior);
    if (!corr_hist_.empty()) {
      std::rotate(corr_hist_.rbegin(), corr_hist_.rbegin() + 1, corr_hist_.rend());
      corr_hist_.front().swap(g);
    }
    ++t_;
    return out;
  }

  StepSizePolicy<Scalar> policy_;
  DagConfig cfg_;
  std::vector<Scalar> d_;
  std::vector<Scalar> c_;
  std::vector<Vector> theta_hist_;  // [0] = theta(t-1), [1] = theta(t-2), ...
  std::vector<Vector> corr_hist_;   // [0] = g(t-1), ...
  long t_ = 0;
};

}  // namespace vsdag
