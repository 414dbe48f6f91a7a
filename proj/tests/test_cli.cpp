#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vsdag/commands.hpp"
#include "vsdag/errors.hpp"

using namespace vsdag;
namespace fs = std::filesystem;

namespace {

KeyValueFile kv(const std::string& text) {
  std::istringstream in(text);
  return KeyValueFile::parse(in);
}

int config_error_line(const std::string& text) {
  try {
    load_experiment(kv(text));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vsdag_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VSDAG_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallFeedforward = R"(
[scenario]
kind = feedforward
duration_s = 12
open_loop_prefix_s = 3
[algorithms]
nlms = 0.0002
[presets]
use = integral, arima2
)";

}  // namespace

TEST(ConfigFile, ParsesSectionsAndComments) {
  const auto f = kv("# top\n[a]\nx = 1 ; trailing\n\n[b]\ny = two words\n");
  ASSERT_TRUE(f.has_section("a"));
  EXPECT_EQ(f.section("a").at(0).value, "1");
  EXPECT_EQ(f.section("a").at(0).line, 3);
  EXPECT_EQ(f.section("b").at(0).value, "two words");
  EXPECT_EQ(f.section_line("b"), 5);
}

TEST(ConfigFile, SyntaxErrorsCarryLine) {
  auto line_of = [](const std::string& text) {
    try {
      kv(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("x = 1\n"), 1);
  EXPECT_EQ(line_of("[a]\nx = 1\nx = 2\n"), 3);
  EXPECT_EQ(line_of("[a]\n[a]\n"), 2);
  EXPECT_EQ(line_of("[a]\njunk\n"), 2);
  EXPECT_EQ(line_of("[a\n"), 1);
}

TEST(Experiment, SemanticErrorsCarryLine) {
  EXPECT_EQ(config_error_line("[scenario]\nkind = feedforward\nbogus = 1\n"), 3);
  EXPECT_EQ(config_error_line("[scenario]\nduration_s = 10\nopen_loop_prefix_s = 15\n"), 2);
  EXPECT_EQ(config_error_line("[scenario]\nwindow_s = abc\n"), 2);
  EXPECT_EQ(config_error_line("[algorithms]\nrls = 0.1\n"), 2);
  EXPECT_EQ(config_error_line("[algorithms]\nlms = -0.1\n"), 2);
  EXPECT_EQ(config_error_line("[presets]\nuse = integral, nope\n"), 2);
  EXPECT_EQ(config_error_line("[presets]\ncustom = 1, 2\n"), 2);
  EXPECT_EQ(config_error_line("[plots]\nx = 1\n"), 1);
  EXPECT_EQ(config_error_line("[scenario]\nkind = sysid\ntrue_params = 1, 2\nadaptive_params = 3\n"), 4);
  EXPECT_EQ(config_error_line("\n[paths]\nsecondary_den = 0, 1\n"), 3);
  EXPECT_EQ(config_error_line("[disturbance]\nkind = pink\n"), 2);
}

TEST(Experiment, ShippedConfigsLoad) {
  const auto ff = load_experiment_file(std::string(VSDAG_SOURCE_DIR) + "/configs/feedforward.ini");
  EXPECT_EQ(ff.scenario.duration_samples, 300000u);
  EXPECT_EQ(ff.scenario.open_loop_prefix_samples, 37500u);
  EXPECT_EQ(ff.algorithms.size(), 3u);
  EXPECT_EQ(ff.presets.size(), 5u);
  const auto sys = load_experiment_file(std::string(VSDAG_SOURCE_DIR) + "/configs/sysid.ini");
  EXPECT_EQ(sys.scenario.kind, ScenarioKind::sysid);
  EXPECT_EQ(sys.scenario.n_adaptive_params, 4u);
  EXPECT_EQ(sys.algorithms.at(0).policy.kind, StepKind::posterior);
}

TEST(Experiment, PathsAndDefaults) {
  const auto ex = load_experiment(kv(
      "[paths]\nprimary_num = 0, 1\nsecondary_num = 0, 0.5\nsecondary_den = 1, -0.5\n"
      "[algorithms]\nnlms_delta = 1e-6\nnlms = 0.01\n"));
  EXPECT_EQ(ex.scenario.secondary_model.numerator(), (Polynomiald{0.0, 0.5}));
  EXPECT_EQ(ex.scenario.regressor_filter.denominator(), (Polynomiald{1.0, -0.5}));
  EXPECT_EQ(ex.algorithms.at(0).policy.delta, 1e-6);
  EXPECT_EQ(ex.presets.size(), 5u);
}

TEST(Check, DefaultTable) {
  const auto rows = cmd_check(table_presets());
  ASSERT_EQ(rows.size(), 5u);
  const std::vector<std::pair<bool, bool>> expect{
      {true, true}, {false, true}, {false, true}, {true, true}, {false, true}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].hpaa_pr, expect[i].first) << rows[i].name;
    EXPECT_EQ(rows[i].hdag_spr, expect[i].second) << rows[i].name;
    EXPECT_LT(std::abs(rows[i].lemma1_integral), 1e-3);
  }
  EXPECT_EQ(rows[4].c1, 0.99);
  EXPECT_EQ(rows[4].d1p, 0.9);
}

TEST(Check, CustomRows) {
  const auto rows =
      cmd_check(load_dag_list(kv("[presets]\nwide = 1.5, 0, 0\nunstable = 0, 0, 1.2\n")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].hdag_spr);
  EXPECT_FALSE(rows[1].hdag_spr);
  EXPECT_FALSE(rows[1].hpaa_pr);
  EXPECT_TRUE(std::isnan(rows[1].lemma1_integral));
}

TEST(Check, CsvRoundTrip) {
  const auto dags = load_dag_list(KeyValueFile::load(std::string(VSDAG_SOURCE_DIR) + "/configs/check_custom.ini"));
  const auto rows = cmd_check(dags);
  std::stringstream ss;
  write_check_csv(ss, rows);
  const auto back = read_check_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].name, rows[i].name);
    EXPECT_EQ(back[i].hdag_spr, rows[i].hdag_spr);
    EXPECT_EQ(back[i].hpaa_pr, rows[i].hpaa_pr);
    EXPECT_EQ(back[i].c1, rows[i].c1);
    EXPECT_NEAR(back[i].min_re_hdag, rows[i].min_re_hdag, 1e-11 * std::abs(rows[i].min_re_hdag));
    // The verdicts are the module-level results, not reformatted copies.
    EXPECT_EQ(back[i].hdag_spr, is_spr_numeric(dags[i].cfg.hdag()).is_spr);
  }
}

TEST(Check, CompareVerdicts) {
  const auto rows = cmd_check(table_presets());
  std::ifstream good(std::string(VSDAG_SOURCE_DIR) + "/configs/table1_expected.csv");
  EXPECT_TRUE(compare_verdicts(rows, good).empty());
  std::istringstream bad("name,hdag_spr,hpaa_pr\narima2,Y,Y\nmissing,Y,Y\n");
  EXPECT_EQ(compare_verdicts(rows, bad).size(), 2u);
}

TEST(Contour, Examples) {
  const auto at = [](const std::vector<ContourCell>& cells, double c1, double c2) {
    for (const auto& c : cells)
      if (std::abs(c.c1 - c1) < 1e-9 && std::abs(c.c2 - c2) < 1e-9) return c;
    throw std::runtime_error("cell not found");
  };
  const auto zero = cmd_contour(0.0, GridAxis{0.0, 1.0, 1}, GridAxis{0.0, 1.0, 1});
  EXPECT_TRUE(zero.at(0).spr_hdag);
  EXPECT_TRUE(zero.at(0).pr_hpaa);

  const auto c9 = cmd_contour(0.9, GridAxis::from_range(0.98, 1.0, 0.01), GridAxis::from_range(0, 0, 1));
  EXPECT_TRUE(at(c9, 0.99, 0.0).spr_hdag);
  EXPECT_FALSE(at(c9, 0.99, 0.0).pr_hpaa);

  const auto c5 = cmd_contour(0.5, GridAxis::from_range(-2.5, 2.5, 0.25), GridAxis::from_range(-1.2, 1.2, 0.2));
  for (const auto& cell : c5) {
    EXPECT_EQ(cell.spr_hdag, arima2_spr_closed_form(cell.c1, cell.c2, 0.5));
    bool pr = false;
    try {
      pr = is_pr_unit_pole(DagConfig::arima2(cell.c1, cell.c2, 0.5)).is_pr;
    } catch (const PreconditionError&) {
    }
    EXPECT_EQ(cell.pr_hpaa, pr);
  }
  EXPECT_TRUE(at(c5, 0.0, 0.0).spr_hdag);
  std::ostringstream os;
  write_contour_csv(os, c5);
  EXPECT_EQ(os.str().rfind("c1,c2,spr_hdag,pr_hpaa\n", 0), 0u);
}

TEST(Bode, Examples) {
  const auto flat = cmd_bode({"integral", make_preset("integral")});
  for (const auto& p : flat.points) {
    ASSERT_EQ(p.gain_db, 0.0);
    ASSERT_EQ(p.phase_deg, 0.0);
  }
  EXPECT_DOUBLE_EQ(flat.points.back().freq_hz, 1250.0);

  const auto ar = cmd_bode({"arima2", make_preset("arima2")});
  EXPECT_NEAR(ar.points.front().gain_db, 20.0 * std::log10(19.9), 1e-9);
  EXPECT_TRUE(ar.phase_within_90);

  for (const auto& dag : table_presets()) {
    const auto r = cmd_bode(dag);
    EXPECT_LT(std::abs(r.mean_log_gain), 1e-3) << dag.name;
    EXPECT_TRUE(r.is_spr);
  }
}

TEST(Compare, TwoPresetsDeterministic) {
  const auto ex = load_experiment(kv(kSmallFeedforward));
  const auto a = cmd_compare(ex);
  ASSERT_EQ(a.summaries.size(), 2u);
  EXPECT_EQ(a.summaries[0].preset, "integral");
  EXPECT_EQ(a.summaries[1].preset, "arima2");
  EXPECT_FALSE(a.any_diverged());

  const auto d1 = scratch_dir("cmp1"), d2 = scratch_dir("cmp2");
  write_compare_outputs(d1.string(), a);
  write_compare_outputs(d2.string(), cmd_compare(ex));
  for (const char* f : {"summary.csv", "trace_nlms_integral.csv", "trace_nlms_arima2.csv"}) {
    ASSERT_TRUE(fs::exists(d1 / f)) << f;
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  }
}

TEST(Compare, DefaultNlmsArimaFaster) {
  Experiment ex;
  ex.scenario = default_feedforward_scenario();
  ex.algorithms = {{"nlms", Policy::normalized(0.0002)}};
  ex.presets = {{"integral", make_preset("integral")}, {"arima2", make_preset("arima2")}};
  const auto res = cmd_compare(ex);
  ASSERT_TRUE(res.summaries[0].seconds_to_threshold && res.summaries[1].seconds_to_threshold);
  EXPECT_LT(*res.summaries[1].seconds_to_threshold, *res.summaries[0].seconds_to_threshold);
}

TEST(Compare, DivergenceRecordedPerRun) {
  auto ex = load_experiment(kv(kSmallFeedforward));
  ex.algorithms = {{"lms", Policy::constant(1e4)}};
  const auto res = cmd_compare(ex);
  ASSERT_EQ(res.summaries.size(), 2u);
  EXPECT_TRUE(res.any_diverged());
  for (const auto& s : res.summaries) EXPECT_TRUE(s.diverged);
}

TEST(Cli, ExitCodesAndDeterminism) {
  const auto dir = scratch_dir("cli");
  const std::string src = VSDAG_SOURCE_DIR;
  EXPECT_EQ(run_cli("check --out " + (dir / "a").string() + " --expect " + src + "/configs/table1_expected.csv"), 0);
  EXPECT_EQ(run_cli("check --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "check.csv"), slurp(dir / "b" / "check.csv"));

  std::ofstream(dir / "wrong.csv") << "name,hdag_spr,hpaa_pr\narima2,N,N\n";
  EXPECT_EQ(run_cli("check --expect " + (dir / "wrong.csv").string()), 1);

  std::ofstream(dir / "short.ini") << "[scenario]\nduration_s = 5\nopen_loop_prefix_s = 10\n";
  EXPECT_EQ(run_cli("run --config " + (dir / "short.ini").string() + " --out " + (dir / "r").string()), 3);
  EXPECT_EQ(run_cli("check --grid 10"), 3);

  std::ofstream(dir / "small.ini") << kSmallFeedforward;
  for (const char* sub : {"c1", "c2"})
    EXPECT_EQ(run_cli("compare --seed 4 --config " + (dir / "small.ini").string() + " --out " +
                      (dir / sub).string()),
              0);
  EXPECT_EQ(slurp(dir / "c1" / "summary.csv"), slurp(dir / "c2" / "summary.csv"));
  EXPECT_EQ(slurp(dir / "c1" / "trace_nlms_arima2.csv"), slurp(dir / "c2" / "trace_nlms_arima2.csv"));

  std::ofstream(dir / "diverge.ini") << "[scenario]\nduration_s = 8\nopen_loop_prefix_s = 2\n"
                                        "[algorithms]\nlms = 10000\n[presets]\nuse = integral\n";
  EXPECT_EQ(run_cli("compare --config " + (dir / "diverge.ini").string() + " --out " + (dir / "d").string()), 2);
  EXPECT_TRUE(fs::exists(dir / "d" / "summary.csv"));
}
