#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsdag/adapt.hpp"
#include "vsdag/dag_config.hpp"
#include "vsdag/noise.hpp"
#include "vsdag/transfer_operator.hpp"

namespace vsdag {

enum class ScenarioKind { sysid, feedforward };

/// Inputs of one simulated experiment.
///
/// sysid: x(t) = theta' phi(t) + n(t), phi(t) = [d(t), ..., d(t - n + 1)].
/// feedforward: residual e(t) = P[w](t) - G[u](t) + n(t) with
/// u(t) = theta0'(t-1) phi(t), phi built from w and the gradient taken along
/// the filtered regressor phi_f = L[phi]. The compensator is disconnected and
/// frozen during the open-loop prefix.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::sysid;
  Eigen::VectorXd true_params;          ///< sysid only
  TransferOperatord primary_path;       ///< feedforward: disturbance to residual
  TransferOperatord secondary_path;     ///< G: compensator output to residual
  TransferOperatord secondary_model;    ///< G hat
  TransferOperatord regressor_filter;   ///< L, normally G hat
  NoiseSpec noise;
  std::size_t n_adaptive_params = 60;
  double measurement_noise_rms = 0.0;
  std::size_t duration_samples = 300000;
  std::size_t open_loop_prefix_samples = 37500;
  double window_seconds = 3.0;

  std::size_t window_samples() const;
  /// Throws ConfigError on violated invariants.
  void validate() const;
};

struct RunOptions {
  /// When false a divergence marks the trace and fills the remaining samples
  /// with NaN instead of throwing.
  bool throw_on_divergence = true;
  /// Keep theta(t) after every step (memory heavy; for cross-checks).
  bool record_theta = false;
};

struct RunTrace {
  ScenarioKind kind = ScenarioKind::sysid;
  double sample_rate_hz = 0.0;
  std::size_t open_loop_prefix = 0;
  std::size_t window_samples = 0;

  std::vector<double> e0;
  std::vector<double> e_post;
  /// Observed error signal: the residual of the feedforward loop, or the
  /// a-priori error for sysid.
  std::vector<double> residual;
  std::vector<double> param_err;       ///< sysid only
  std::vector<double> attenuation_db;  ///< feedforward only, one per block window
  bool attenuation_clamped = false;

  bool diverged = false;
  long divergence_step = -1;
  std::string warning;
  double wall_time_s = 0.0;

  Eigen::VectorXd theta_final;
  std::vector<Eigen::VectorXd> theta_path;

  std::size_t size() const noexcept { return e0.size(); }
};

using Policy = StepSizePolicy<double>;

RunTrace run_sysid(const ScenarioConfig& scn, const Policy& policy, const DagConfig& cfg,
                   const RunOptions& opts = {});
RunTrace run_feedforward(const ScenarioConfig& scn, const Policy& policy, const DagConfig& cfg,
                         const RunOptions& opts = {});
/// Dispatches on scn.kind.
RunTrace run_scenario(const ScenarioConfig& scn, const Policy& policy, const DagConfig& cfg,
                      const RunOptions& opts = {});

inline constexpr double kAttenuationCeilingDb = 120.0;

struct AttenuationSeries {
  std::vector<double> db;
  bool clamped = false;  ///< some window had zero controlled variance
};

/// 10 log10(var_open_loop / var_window) over non-overlapping windows of the
/// whole residual, with var_open_loop taken over the first
/// `open_loop_prefix` samples. Windows with zero variance read
/// kAttenuationCeilingDb.
AttenuationSeries attenuation_db(std::span<const double> residual, std::size_t open_loop_prefix,
                                 std::size_t window);
AttenuationSeries attenuation_db(const RunTrace& trace, double window_seconds,
                                 double sample_rate_hz);

/// First window index whose value is >= threshold and whose following window
/// is too. The final window has no successor and never qualifies.
std::optional<std::size_t> time_to_threshold(std::span<const double> series, double threshold_db);

/// Seconds from the end of the open-loop prefix to the end of the first
/// sustained crossing window, or nullopt.
std::optional<double> seconds_to_threshold(const RunTrace& trace, double threshold_db);

/// G / G hat with common leading delays removed, or nullopt when the ratio
/// is not causal.
std::optional<TransferOperatord> feedforward_path_ratio(const TransferOperatord& g,
                                                        const TransferOperatord& g_hat);

/// Default desk-scale feedforward scenario: unit-RMS 70-170 Hz disturbance
/// at 2500 Hz, 60 taps, lightly damped fourth-order secondary path with
/// G hat = L = G, 15 s open loop followed by 105 s of adaptation.
ScenarioConfig default_feedforward_scenario();

/// Small system-identification scenario with white input.
ScenarioConfig default_sysid_scenario();

/// CSV: step,time_s,e0,e_post,residual,param_err,atten_db. Undefined values
/// are left empty.
void write_trace_csv(std::ostream& os, const RunTrace& trace);

}  // namespace vsdag
