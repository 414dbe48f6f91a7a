#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vsdag/commands.hpp"
#include "vsdag/csv.hpp"
#include "vsdag/errors.hpp"

using namespace vsdag;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<unsigned long long> seed;
  std::size_t grid = kDefaultSprGrid;
  std::size_t quad = kDefaultQuadPoints;
  std::string expect;
  double d1p = 0.5;
  std::string c1_range = "-2.5,2.5,0.025";
  std::string c2_range = "-1.2,1.2,0.012";
  std::string algorithm;
  std::string preset;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

GridAxis parse_range(const std::string& text, const char* flag) {
  auto parts = split_csv_line(text);
  if (parts.size() != 3) throw ConfigError(std::string(flag) + " expects lo,hi,step");
  try {
    const double lo = std::stod(parts[0]), hi = std::stod(parts[1]), step = std::stod(parts[2]);
    if (!(step > 0.0) || hi < lo) throw ConfigError(std::string(flag) + ": need lo <= hi, step > 0");
    return GridAxis::from_range(lo, hi, step);
  } catch (const std::logic_error&) {
    throw ConfigError(std::string(flag) + ": malformed number in '" + text + "'");
  }
}

Experiment experiment_from(const Options& o) {
  Experiment ex;
  if (o.config.empty()) {
    ex.scenario = default_feedforward_scenario();
    ex.algorithms = default_algorithms();
    ex.presets = table_presets();
  } else {
    ex = load_experiment_file(o.config);
  }
  if (o.seed) {
    ex.scenario.noise.seed = *o.seed;
    ex.scenario.validate();
  }
  return ex;
}

std::vector<NamedDag> dags_from(const Options& o) {
  if (o.config.empty()) return table_presets();
  return load_dag_list(KeyValueFile::load(o.config));
}

int do_check(const Options& o) {
  const auto rows = cmd_check(dags_from(o), o.grid, o.quad);
  write_check_csv(std::cout, rows);
  if (!o.out.empty()) {
    auto f = open_out(fs::path(o.out) / "check.csv");
    write_check_csv(f, rows);
  }
  if (o.expect.empty()) return kExitOk;
  std::ifstream in(o.expect);
  if (!in) throw ConfigError("cannot read " + o.expect);
  const auto problems = compare_verdicts(rows, in);
  for (const auto& p : problems) std::cerr << "mismatch: " << p << '\n';
  return problems.empty() ? kExitOk : kExitVerdictMismatch;
}

int do_contour(const Options& o) {
  const auto cells = cmd_contour(o.d1p, parse_range(o.c1_range, "--c1"),
                                 parse_range(o.c2_range, "--c2"), o.grid);
  if (o.out.empty()) {
    write_contour_csv(std::cout, cells);
  } else {
    auto f = open_out(fs::path(o.out) / ("contour_d1p_" + format_number(o.d1p) + ".csv"));
    write_contour_csv(f, cells);
  }
  return kExitOk;
}

int do_bode(const Options& o) {
  double fs_hz = 2500.0;
  if (!o.config.empty()) {
    const auto file = KeyValueFile::load(o.config);
    if (file.has_section("scenario") || file.has_section("disturbance"))
      fs_hz = load_experiment(file).scenario.noise.sample_rate_hz;
  }
  std::vector<BodeReport> reports;
  for (const auto& dag : dags_from(o)) reports.push_back(cmd_bode(dag, o.grid, fs_hz, o.quad));
  write_bode_summary_csv(std::cout, reports);
  if (!o.out.empty()) {
    for (const auto& r : reports) {
      auto f = open_out(fs::path(o.out) / ("bode_" + r.name + ".csv"));
      write_bode_csv(f, r);
    }
    auto f = open_out(fs::path(o.out) / "bode_summary.csv");
    write_bode_summary_csv(f, reports);
  }
  return kExitOk;
}

int finish_runs(const Options& o, const CompareResult& res) {
  write_summary_csv(std::cout, res.summaries);
  for (const auto& s : res.summaries) {
    if (!s.warning.empty()) std::cerr << s.algorithm << '/' << s.preset << ": " << s.warning << '\n';
    if (s.diverged)
      std::cerr << s.algorithm << '/' << s.preset << ": diverged at step " << s.divergence_step
                << '\n';
  }
  write_compare_outputs(o.out.empty() ? "out" : o.out, res);
  return res.any_diverged() ? kExitDivergence : kExitOk;
}

int do_run(const Options& o) {
  const Experiment ex = experiment_from(o);
  AlgorithmSpec alg = ex.algorithms.front();
  if (!o.algorithm.empty()) {
    const StepKind kind = parse_step_kind(o.algorithm);
    bool found = false;
    for (const auto& a : ex.algorithms)
      if (a.policy.kind == kind) alg = a, found = true;
    if (!found) throw ConfigError("algorithm '" + o.algorithm + "' not configured");
  }
  NamedDag dag = ex.presets.back();
  if (!o.preset.empty()) {
    bool found = false;
    for (const auto& p : ex.presets)
      if (p.name == o.preset) dag = p, found = true;
    if (!found) dag = {o.preset, make_preset(o.preset)};
  }
  return finish_runs(o, cmd_run(ex, alg, dag));
}

int do_compare(const Options& o) { return finish_runs(o, cmd_compare(experiment_from(o))); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic adaptation gain toolkit for VS-LMS adaptive filters"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", o.config, "Experiment / preset file")->check(CLI::ExistingFile);
  };
  auto add_grid = [&](CLI::App* c) {
    c->add_option("--grid", o.grid, "Frequency grid points")->check(CLI::Range(256ul, 1ul << 24));
  };
  auto add_quad = [&](CLI::App* c) {
    c->add_option("--quad", o.quad, "Quadrature cells for the log-gain integral")
        ->check(CLI::Range(16ul, 1ul << 24));
  };

  auto* check = app.add_subcommand("check", "SPR / PR verdict table");
  add_config(check);
  add_grid(check);
  add_quad(check);
  check->add_option("--out", o.out, "Directory for check.csv");
  check->add_option("--expect", o.expect, "Expected verdicts CSV (name,hdag_spr,hpaa_pr)");

  auto* contour = app.add_subcommand("contour", "SPR and PR flags over a (c1, c2) grid");
  contour->add_option("--d1p", o.d1p, "Denominator coefficient d'1")->check(CLI::Range(-0.999999, 0.999999));
  contour->add_option("--c1", o.c1_range, "lo,hi,step")->capture_default_str();
  contour->add_option("--c2", o.c2_range, "lo,hi,step")->capture_default_str();
  contour->add_option("--out", o.out, "Output directory (stdout when omitted)");
  add_grid(contour);

  auto* bode = app.add_subcommand("bode", "Gain and phase of each preset");
  add_config(bode);
  add_grid(bode);
  add_quad(bode);
  bode->add_option("--out", o.out, "Output directory");

  auto* run = app.add_subcommand("run", "Single experiment");
  add_config(run);
  run->add_option("--out", o.out, "Output directory")->capture_default_str();
  run->add_option("--seed", o.seed, "Disturbance seed override");
  run->add_option("--algorithm", o.algorithm, "lms, nlms or plms");
  run->add_option("--preset", o.preset, "Preset name");

  auto* compare = app.add_subcommand("compare", "Every algorithm against every preset");
  add_config(compare);
  compare->add_option("--out", o.out, "Output directory");
  compare->add_option("--seed", o.seed, "Disturbance seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (*check) return do_check(o);
    if (*contour) return do_contour(o);
    if (*bode) return do_bode(o);
    if (*run) return do_run(o);
    return do_compare(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
  }
  return kExitConfigError;
}
