// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "vsdag/adapt.hpp"
#include "vsdag/commands.hpp"
#include "vsdag/sim.hpp"
#include "vsdag/spr.hpp"

using namespace vsdag;
using Vec = Eigen::VectorXd;

namespace {

// Pinned tolerances and budgets.
constexpr double kVerdictBudgetS = 5.0;
constexpr double kLogGainTol = 1e-3;
constexpr std::size_t kLogGainQuad = 4096;
constexpr int kLogGainRandomConfigs = 200;
constexpr double kLogGainBudgetS = 10.0;
constexpr std::size_t kRegionGridSide = 200;
constexpr double kRegionBoundaryBand = 1e-6;
constexpr long kIdentitySteps = 10000;
constexpr long kPlmsSteps = 100000;
constexpr double kPlmsTol = 1e-12;
constexpr double kGradientRelTol = 1e-6;
constexpr long kConvergenceSteps = 100000;
constexpr double kConvergenceErrTol = 1e-6;
constexpr double kThresholdDb = 20.0;
constexpr double kAccelerationFactor = 5.0;
constexpr double kPerAlgorithmBudgetS = 120.0;
constexpr double kLowGainFloorDb = 20.0;
constexpr double kHighGainCeilDb = 0.0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome verdict_table() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = cmd_check(table_presets());
  const double dt = seconds_since(t0);
  // (H_PAA PR, H_DAG SPR) in row order integral, conj/Nesterov, I+P+D, I+P, ARIMA2.
  const std::vector<std::pair<bool, bool>> expect{
      {true, true}, {false, true}, {false, true}, {true, true}, {false, true}};
  bool ok = rows.size() == expect.size();
  std::string got;
  for (std::size_t i = 0; ok && i < rows.size(); ++i) {
    ok = ok && rows[i].hpaa_pr == expect[i].first && rows[i].hdag_spr == expect[i].second;
    got += std::string(i ? " " : "") + "(" + (rows[i].hpaa_pr ? "Y" : "N") + "," +
           (rows[i].hdag_spr ? "Y" : "N") + ")";
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "verdicts %s in %.3f s", got.c_str(), dt);
  return {ok && dt < kVerdictBudgetS, buf};
}

Outcome log_gain() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& p : table_presets())
    worst = std::max(worst, std::abs(lemma1_integral(p.cfg.hdag(), kLogGainQuad)));
  std::mt19937_64 rng(2024);
  for (int k = 0; k < kLogGainRandomConfigs; ++k) {
    const auto num = testutil::random_stable_poly(rng, 1 + int(rng() % 4), 0.97);
    const auto den = testutil::random_stable_poly(rng, 1 + int(rng() % 3), 0.97);
    const TransferOperatord h(Polynomiald::from_vector(num), Polynomiald::from_vector(den));
    worst = std::max(worst, std::abs(lemma1_integral(h, kLogGainQuad)));
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |integral| %.3g over 5 presets + %d random configs in %.2f s",
                worst, kLogGainRandomConfigs, dt);
  return {worst < kLogGainTol && dt < kLogGainBudgetS, buf};
}

Outcome closed_form_region() {
  const auto c1 = GridAxis::spanning(-2.5, 2.5, kRegionGridSide);
  const auto c2 = GridAxis::spanning(-1.2, 1.2, kRegionGridSide);
  std::size_t bad = 0, banded = 0, as_published_bad = 0;
  std::string per_d;
  for (double d : {0.0, 0.5, 0.9}) {
    const auto exact = spr_region_grid(d, c1, c2, Lemma2Form::exact);
    const auto quoted = spr_region_grid(d, c1, c2, Lemma2Form::as_published);
    std::size_t bad_d = 0, quoted_d = 0;
    for (std::size_t i = 0; i < c1.count; ++i)
      for (std::size_t j = 0; j < c2.count; ++j) {
        const auto v = is_spr_numeric(DagConfig::arima2(c1.at(i), c2.at(j), d).hdag());
        if (v.is_stable && std::abs(v.min_real_part) < kRegionBoundaryBand) {
          ++banded;
          continue;
        }
        bad_d += exact.at(i, j) != v.is_spr;
        quoted_d += quoted.at(i, j) != v.is_spr;
      }
    bad += bad_d;
    as_published_bad += quoted_d;
    per_d += " d'=" + std::to_string(d).substr(0, 3) + ":" + std::to_string(bad_d);
  }
  return {bad == 0, "disagreements outside boundary band" + per_d + " (" + std::to_string(banded) +
                        " cells in band; as-published bounds disagree on " +
                        std::to_string(as_published_bad) + ")"};
}

Outcome dag_identity() {
  using P = StepSizePolicy<double>;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  std::size_t mismatches = 0;
  for (const P& pol : {P::constant(0.01), P::normalized(0.5), P::posterior(0.5)}) {
    DagAdaptiveFilter<double> f(8, pol, DagConfig({}, {}));
    Vec theta = Vec::Zero(8);
    for (long t = 0; t < kIdentitySteps; ++t) {
      Vec phi(8);
      for (auto& v : phi) v = g(rng);
      const double x = g(rng);
      f.update(phi, x);
      // Reference VS-LMS step.
      const double e0 = x - theta.dot(phi);
      double mu_t = pol.mu;
      if (pol.kind == StepKind::normalized) mu_t = pol.mu / (pol.delta + phi.squaredNorm());
      if (pol.kind == StepKind::posterior) mu_t = pol.mu / (1.0 + pol.mu * phi.squaredNorm());
      theta += (mu_t * e0) * phi;
      for (Eigen::Index i = 0; i < theta.size(); ++i)
        mismatches += std::bit_cast<std::uint64_t>(theta[i]) !=
                      std::bit_cast<std::uint64_t>(f.estimate()[i]);
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " differing components over 3 x " +
                               std::to_string(kIdentitySteps) + " steps"};
}

Outcome plms_identities() {
  std::mt19937_64 rng(91);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> umu(0.01, 10.0);
  double worst_identity = 0.0, worst_forms = 0.0;
  const double mu = 2.0;
  DagAdaptiveFilter<double> f(6, StepSizePolicy<double>::posterior(mu));
  for (long t = 0; t < kPlmsSteps; ++t) {
    Vec phi(6);
    for (auto& v : phi) v = g(rng);
    const Vec before = f.estimate();
    const auto p = f.update(phi, g(rng));
    const double energy = phi.squaredNorm();
    worst_identity = std::max(worst_identity, std::abs(p.e_post * (1.0 + mu * energy) - p.e0) /
                                                  std::max(1.0, std::abs(p.e0)));
    const Vec a = before + mu * phi * p.e_post;
    const Vec b = before + (mu / (1.0 + mu * energy)) * phi * p.e0;
    worst_forms = std::max(worst_forms, (a - b).cwiseAbs().maxCoeff());
  }
  // Gradient of the a-posteriori error with respect to the new estimate is -phi.
  double worst_grad = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    DagAdaptiveFilter<double> h(5, StepSizePolicy<double>::posterior(umu(rng)));
    Vec phi(5);
    for (auto& v : phi) v = g(rng);
    const double x = g(rng);
    h.update(phi, x);
    const Vec th = h.estimate();
    Vec fd(5);
    for (int i = 0; i < 5; ++i) {
      Vec up = th, dn = th;
      up[i] += 1e-6;
      dn[i] -= 1e-6;
      fd[i] = ((x - up.dot(phi)) - (x - dn.dot(phi))) / 2e-6;
    }
    worst_grad = std::max(worst_grad, (fd + phi).norm() / phi.norm());
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "max identity residual %.2g, max two-form gap %.2g over %ld steps; gradient rel err %.2g",
                worst_identity, worst_forms, kPlmsSteps, worst_grad);
  return {worst_identity <= kPlmsTol && worst_forms <= kPlmsTol && worst_grad < kGradientRelTol, buf};
}

Outcome posterior_convergence() {
  ScenarioConfig scn = default_sysid_scenario();
  scn.duration_samples = std::size_t(kConvergenceSteps);
  scn.measurement_noise_rms = 0.0;
  bool ok = true;
  std::string detail;
  for (double mu : {0.1, 1.0, 10.0}) {
    RunOptions opts;
    opts.throw_on_divergence = false;
    const auto tr = run_sysid(scn, Policy::posterior(mu), make_preset("ip"), opts);
    long settled = -1;
    for (long t = long(tr.size()) - 1; t >= 0; --t) {
      if (!(std::abs(tr.e_post[std::size_t(t)]) < kConvergenceErrTol)) break;
      settled = t;
    }
    ok = ok && !tr.diverged && settled >= 0;
    detail += " mu=" + std::to_string(mu).substr(0, 4) + ": " +
              (tr.diverged ? "diverged" : settled >= 0 ? "below from step " + std::to_string(settled)
                                                       : "not settled");
  }
  return {ok, "|e| < 1e-6 held to the end;" + detail};
}

Outcome acceleration() {
  const ScenarioConfig scn = default_feedforward_scenario();
  const std::vector<AlgorithmSpec> algs = default_algorithms();
  bool ok = true;
  std::string detail;
  for (const auto& alg : algs) {
    const auto t0 = std::chrono::steady_clock::now();
    std::map<std::string, double> times;
    for (const auto& p : table_presets()) {
      RunOptions opts;
      opts.throw_on_divergence = false;
      const auto tr = run_feedforward(scn, alg.policy, p.cfg, opts);
      const auto s = seconds_to_threshold(tr, kThresholdDb);
      times[p.name] = s ? *s : std::numeric_limits<double>::infinity();
    }
    const double dt = seconds_since(t0);
    const double arima = times.at("arima2"), integral = times.at("integral");
    bool first = true;
    for (const auto& [name, t] : times) first = first && arima <= t;
    const bool pass = std::isfinite(arima) && arima * kAccelerationFactor <= integral && first &&
                      dt < kPerAlgorithmBudgetS;
    ok = ok && pass;
    char buf[260];
    std::snprintf(buf, sizeof buf,
                  " %s[integral %g s, conj %g, ipd %g, ip %g, arima2 %g; ratio %.3g; %.1f s]",
                  alg.name.c_str(), integral, times.at("conj_nesterov"), times.at("ipd"),
                  times.at("ip"), arima, integral / arima, dt);
    detail += buf;
  }
  return {ok, "time to 20 dB after adaptation starts:" + detail};
}

Outcome frequency_sanity() {
  std::vector<TransferOperatord> spr_configs;
  for (const auto& p : table_presets())
    if (is_spr_numeric(p.cfg.hdag()).is_spr) spr_configs.push_back(p.cfg.hdag());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u1(-2.0, 2.0), u2(-0.95, 0.95), ud(-0.95, 0.95);
  while (spr_configs.size() < 500) {
    const auto h = DagConfig::arima2(u1(rng), u2(rng), ud(rng)).hdag();
    if (is_spr_numeric(h).is_spr) spr_configs.push_back(h);
  }
  std::size_t phase_violations = 0;
  for (const auto& h : spr_configs)
    for (double w : omega_grid(kDefaultSprGrid))
      phase_violations += !(std::abs(std::arg(h.freq_response(w))) < std::numbers::pi / 2);
  const auto bode = cmd_bode({"arima2", make_preset("arima2")});
  const double low = bode.points.front().gain_db, high = bode.points.back().gain_db;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu phase points outside +-90 deg over %zu SPR configs; arima2 gain %.2f dB at 0 Hz, %.2f dB at 1250 Hz",
                phase_violations, spr_configs.size(), low, high);
  return {phase_violations == 0 && low > kLowGainFloorDb && high < kHighGainCeilDb, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 preset verdict table", verdict_table},
      {"2 log-gain integral", log_gain},
      {"3 closed-form SPR region vs sweep", closed_form_region},
      {"4 trivial DAG equals plain VS-LMS", dag_identity},
      {"5 posterior-step identities", plms_identities},
      {"6 posterior step + I+P converges for any mu", posterior_convergence},
      {"7 ARIMA2 accelerates convergence", acceleration},
      {"8 frequency-domain sanity", frequency_sanity},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
