#include "vsdag/sim.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "vsdag/csv.hpp"
#include "vsdag/metrics.hpp"
#include "vsdag/spr.hpp"

namespace vsdag {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kMeasurementStream = 0x9E3779B97F4A7C15ULL;

// Shift-register regressor [v(t), v(t-1), ..., v(t-n+1)].
class DelayLine {
 public:
  explicit DelayLine(std::size_t n) : buf_(Eigen::VectorXd::Zero(Eigen::Index(n))) {}

  void push(double v) {
    const Eigen::Index n = buf_.size();
    if (n > 1) buf_.tail(n - 1) = buf_.head(n - 1).eval();
    buf_[0] = v;
  }

  const Eigen::VectorXd& vector() const noexcept { return buf_; }

 private:
  Eigen::VectorXd buf_;
};

std::vector<double> measurement_noise(const ScenarioConfig& scn) {
  std::vector<double> out(scn.duration_samples, 0.0);
  if (scn.measurement_noise_rms > 0.0) {
    std::mt19937_64 rng(scn.noise.seed ^ kMeasurementStream);
    std::normal_distribution<double> gauss(0.0, scn.measurement_noise_rms);
    for (auto& v : out) v = gauss(rng);
  }
  return out;
}

RunTrace make_trace(const ScenarioConfig& scn) {
  RunTrace tr;
  tr.kind = scn.kind;
  tr.sample_rate_hz = scn.noise.sample_rate_hz;
  tr.open_loop_prefix = scn.open_loop_prefix_samples;
  tr.window_samples = scn.window_samples();
  tr.e0.reserve(scn.duration_samples);
  tr.e_post.reserve(scn.duration_samples);
  tr.residual.reserve(scn.duration_samples);
  return tr;
}

void pad_after_divergence(RunTrace& tr, std::size_t n, const DivergenceError& err, long step) {
  tr.diverged = true;
  tr.divergence_step = step;
  tr.warning += std::string(tr.warning.empty() ? "" : "; ") + err.what();
  const bool with_err = !tr.param_err.empty() || tr.kind == ScenarioKind::sysid;
  while (tr.e0.size() < n) {
    tr.e0.push_back(kNaN);
    tr.e_post.push_back(kNaN);
    tr.residual.push_back(kNaN);
    if (with_err) tr.param_err.push_back(kNaN);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Fourth-order resonant secondary path q^-1 B(q^-1) / A(q^-1).
TransferOperatord synthetic_secondary_path() {
  const double fs = 2500.0;
  auto resonance = [fs](double f_hz, double radius) {
    const double w = 2.0 * std::numbers::pi * f_hz / fs;
    return Polynomiald{1.0, -2.0 * radius * std::cos(w), radius * radius};
  };
  // Gain chosen so that a unit-RMS 70-170 Hz disturbance gives a 60-tap
  // filtered regressor energy of about 1.1e-3.
  const double gain = 2.08e-3;
  const Polynomiald den = resonance(110.0, 0.95) * resonance(420.0, 0.97);
  const Polynomiald num{0.0, 0.05 * gain, 0.03 * gain, -0.02 * gain};
  return {num, den};
}

// Acoustic propagation stand-in: a delayed, decaying FIR that a 60-tap
// compensator can represent after the secondary path is inverted.
Polynomiald synthetic_propagation() {
  Polynomiald::Coeffs f = Polynomiald::Coeffs::Zero(48);
  for (Eigen::Index k = 6; k < f.size(); ++k) {
    const double n = double(k - 6);
    f[k] = 0.9 * std::pow(0.92, n) * std::cos(0.35 * n + 0.4);
  }
  return Polynomiald(f);
}

}  // namespace

std::size_t ScenarioConfig::window_samples() const {
  return std::size_t(std::llround(window_seconds * noise.sample_rate_hz));
}

void ScenarioConfig::validate() const {
  try {
    noise.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  if (n_adaptive_params < 1) throw ConfigError("n_adaptive_params must be at least 1");
  if (duration_samples == 0) throw ConfigError("duration must be positive");
  if (duration_samples <= open_loop_prefix_samples)
    throw ConfigError("duration must exceed the open-loop prefix");
  if (measurement_noise_rms < 0.0) throw ConfigError("measurement noise RMS must be non-negative");
  if (kind == ScenarioKind::sysid && std::size_t(true_params.size()) != n_adaptive_params)
    throw ConfigError("sysid needs as many true parameters as adaptive parameters");
  if (kind == ScenarioKind::feedforward && !(window_seconds > 0.0))
    throw ConfigError("attenuation window must be positive");
}

RunTrace run_sysid(const ScenarioConfig& scn, const Policy& policy, const DagConfig& cfg,
                   const RunOptions& opts) {
  if (scn.kind != ScenarioKind::sysid) throw ConfigError("run_sysid needs a sysid scenario");
  scn.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = scn.duration_samples;
  const auto input = gen_noise(scn.noise, n);
  const auto noise = measurement_noise(scn);

  RunTrace tr = make_trace(scn);
  tr.param_err.reserve(n);
  DagAdaptiveFilter<double> filter(Eigen::Index(scn.n_adaptive_params), policy, cfg);
  DelayLine phi(scn.n_adaptive_params);

  for (std::size_t t = 0; t < n; ++t) {
    phi.push(input[t]);
    const double x = scn.true_params.dot(phi.vector()) + noise[t];
    try {
      const auto p = filter.update(phi.vector(), x);
      tr.e0.push_back(p.e0);
      tr.e_post.push_back(p.e_post);
      tr.residual.push_back(p.e0);
      tr.param_err.push_back((scn.true_params - filter.estimate()).norm());
    } catch (const DivergenceError& e) {
      if (opts.throw_on_divergence) throw DivergenceError(long(t), "sysid run diverged");
      pad_after_divergence(tr, n, e, long(t));
      break;
    }
    if (opts.record_theta) tr.theta_path.push_back(filter.estimate());
  }
  tr.theta_final = filter.estimate();
  tr.wall_time_s = seconds_since(start);
  return tr;
}

RunTrace run_feedforward(const ScenarioConfig& scn, const Policy& policy, const DagConfig& cfg,
                         const RunOptions& opts) {
  if (scn.kind != ScenarioKind::feedforward)
    throw ConfigError("run_feedforward needs a feedforward scenario");
  scn.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = scn.duration_samples;
  const auto disturbance = gen_noise(scn.noise, n);
  const auto noise = measurement_noise(scn);

  RunTrace tr = make_trace(scn);
  if (const auto ratio = feedforward_path_ratio(scn.secondary_path, scn.secondary_model)) {
    if (!ratio->is_identity() && !is_spr_numeric(*ratio).is_spr)
      tr.warning = "G/Ghat is not SPR";
  } else {
    tr.warning = "G/Ghat is not causal";
  }

  TransferOperatord primary = scn.primary_path;
  TransferOperatord secondary = scn.secondary_path;
  TransferOperatord regressor_filter = scn.regressor_filter;
  primary.reset();
  secondary.reset();
  regressor_filter.reset();

  DagAdaptiveFilter<double> filter(Eigen::Index(scn.n_adaptive_params), policy, cfg);
  DelayLine phi(scn.n_adaptive_params);
  DelayLine phi_f(scn.n_adaptive_params);

  for (std::size_t t = 0; t < n; ++t) {
    const double w = disturbance[t];
    phi.push(w);
    phi_f.push(regressor_filter.step(w));
    const double x = primary.step(w);

    if (t < scn.open_loop_prefix_samples) {
      const double e = x - secondary.step(0.0) + noise[t];
      tr.e0.push_back(e);
      tr.e_post.push_back(e);
      tr.residual.push_back(e);
    } else {
      const double u = filter.predict(phi.vector());
      const double e = x - secondary.step(u) + noise[t];
      try {
        const auto p = filter.adapt(phi_f.vector(), e);
        tr.e0.push_back(p.e0);
        tr.e_post.push_back(p.e_post);
        tr.residual.push_back(e);
      } catch (const DivergenceError& err) {
        if (opts.throw_on_divergence) throw DivergenceError(long(t), "feedforward run diverged");
        pad_after_divergence(tr, n, err, long(t));
        break;
      }
    }
    if (opts.record_theta) tr.theta_path.push_back(filter.estimate());
  }
  tr.theta_final = filter.estimate();

  if (scn.open_loop_prefix_samples > 0 && !tr.diverged) {
    auto att = attenuation_db(tr.residual, scn.open_loop_prefix_samples, tr.window_samples);
    tr.attenuation_db = std::move(att.db);
    tr.attenuation_clamped = att.clamped;
  }
  tr.wall_time_s = seconds_since(start);
  return tr;
}

RunTrace run_scenario(const ScenarioConfig& scn, const Policy& policy, const DagConfig& cfg,
                      const RunOptions& opts) {
  return scn.kind == ScenarioKind::sysid ? run_sysid(scn, policy, cfg, opts)
                                         : run_feedforward(scn, policy, cfg, opts);
}

AttenuationSeries attenuation_db(std::span<const double> residual, std::size_t open_loop_prefix,
                                 std::size_t window) {
  if (open_loop_prefix == 0 || open_loop_prefix > residual.size())
    throw PreconditionError("attenuation needs an open-loop prefix inside the trace");
  const double reference = variance(residual.first(open_loop_prefix));
  AttenuationSeries out;
  for (double v : windowed_variance(residual, window, VarianceMode::block)) {
    if (v == 0.0) {
      out.db.push_back(kAttenuationCeilingDb);
      out.clamped = true;
    } else {
      out.db.push_back(std::min(kAttenuationCeilingDb, 10.0 * std::log10(reference / v)));
    }
  }
  return out;
}

AttenuationSeries attenuation_db(const RunTrace& trace, double window_seconds,
                                 double sample_rate_hz) {
  return attenuation_db(trace.residual, trace.open_loop_prefix,
                        std::size_t(std::llround(window_seconds * sample_rate_hz)));
}

std::optional<std::size_t> time_to_threshold(std::span<const double> series, double threshold_db) {
  for (std::size_t i = 0; i + 1 < series.size(); ++i)
    if (series[i] >= threshold_db && series[i + 1] >= threshold_db) return i;
  return std::nullopt;
}

std::optional<double> seconds_to_threshold(const RunTrace& trace, double threshold_db) {
  const auto idx = time_to_threshold(trace.attenuation_db, threshold_db);
  if (!idx) return std::nullopt;
  const double end = double((*idx + 1) * trace.window_samples);
  return (end - double(trace.open_loop_prefix)) / trace.sample_rate_hz;
}

std::optional<TransferOperatord> feedforward_path_ratio(const TransferOperatord& g,
                                                        const TransferOperatord& g_hat) {
  if (g.numerator() == g_hat.numerator() && g.denominator() == g_hat.denominator())
    return TransferOperatord{};
  auto num = (g.numerator() * g_hat.denominator()).canonical().coeffs();
  auto den = (g.denominator() * g_hat.numerator()).canonical().coeffs();
  Eigen::Index lead = 0;
  while (lead < num.size() - 1 && lead < den.size() - 1 && num[lead] == 0.0 && den[lead] == 0.0)
    ++lead;
  if (den[lead] == 0.0) return std::nullopt;
  return TransferOperatord(Polynomiald(Polynomiald::Coeffs(num.tail(num.size() - lead))),
                           Polynomiald(Polynomiald::Coeffs(den.tail(den.size() - lead))));
}

ScenarioConfig default_feedforward_scenario() {
  ScenarioConfig scn;
  scn.kind = ScenarioKind::feedforward;
  scn.secondary_path = synthetic_secondary_path();
  scn.secondary_model = scn.secondary_path;
  scn.regressor_filter = scn.secondary_model;
  scn.primary_path = TransferOperatord(synthetic_propagation() * scn.secondary_path.numerator(),
                                       scn.secondary_path.denominator());
  scn.noise = NoiseSpec{NoiseKind::bandpass, 70.0, 170.0, 2500.0, 1, 1.0};
  scn.n_adaptive_params = 60;
  scn.measurement_noise_rms = 1e-4;
  scn.duration_samples = 300000;
  scn.open_loop_prefix_samples = 37500;
  scn.window_seconds = 3.0;
  return scn;
}

ScenarioConfig default_sysid_scenario() {
  ScenarioConfig scn;
  scn.kind = ScenarioKind::sysid;
  scn.true_params = Eigen::Vector4d(0.5, -0.3, 0.2, 0.1);
  scn.n_adaptive_params = 4;
  scn.noise = NoiseSpec{NoiseKind::white, 70.0, 170.0, 2500.0, 1, 1.0};
  scn.duration_samples = 20000;
  scn.open_loop_prefix_samples = 0;
  return scn;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "step,time_s,e0,e_post,residual,param_err,atten_db\n";
  const bool has_err = trace.param_err.size() == trace.size();
  const std::size_t win = trace.window_samples;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const std::size_t block = win > 0 ? t / win : 0;
    const bool has_att = win > 0 && block < trace.attenuation_db.size();
    os << t << ',' << format_number(double(t) / trace.sample_rate_hz) << ','
       << format_number(trace.e0[t]) << ',' << format_number(trace.e_post[t]) << ','
       << format_number(trace.residual[t]) << ','
       << (has_err ? format_number(trace.param_err[t]) : std::string()) << ','
       << (has_att ? format_number(trace.attenuation_db[block]) : std::string()) << '\n';
  }
}

}  // namespace vsdag
