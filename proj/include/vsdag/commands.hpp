#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vsdag/config_file.hpp"
#include "vsdag/spr.hpp"

namespace vsdag {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerdictMismatch = 1,
  kExitDivergence = 2,
  kExitConfigError = 3,
};

// check ---------------------------------------------------------------------

struct CheckRow {
  std::string name;
  double c1 = 0.0;
  double c2 = 0.0;
  double d1p = 0.0;
  bool hdag_spr = false;
  bool hpaa_pr = false;
  double min_re_hdag = 0.0;
  double lemma1_integral = 0.0;  ///< NaN when C or D' is not strictly stable
};

std::vector<CheckRow> cmd_check(const std::vector<NamedDag>& dags,
                                std::size_t grid = kDefaultSprGrid,
                                std::size_t quad = kDefaultQuadPoints);

/// name,c1,c2,d1p,hdag_spr,hpaa_pr,min_re_hdag,lemma1_integral with Y/N flags.
void write_check_csv(std::ostream& os, const std::vector<CheckRow>& rows);
std::vector<CheckRow> read_check_csv(std::istream& is);

/// Golden verdicts: CSV with at least the columns name, hdag_spr, hpaa_pr.
/// Returns one message per mismatching or missing row.
std::vector<std::string> compare_verdicts(const std::vector<CheckRow>& rows, std::istream& expected);

// contour -------------------------------------------------------------------

struct ContourCell {
  double c1 = 0.0;
  double c2 = 0.0;
  bool spr_hdag = false;
  bool pr_hpaa = false;
};

/// Closed-form SPR flag and numerical PR flag for every (c1, c2) cell.
std::vector<ContourCell> cmd_contour(double d1p, const GridAxis& c1_axis, const GridAxis& c2_axis,
                                     std::size_t grid = kDefaultSprGrid);

/// c1,c2,spr_hdag,pr_hpaa with 1/0 flags.
void write_contour_csv(std::ostream& os, const std::vector<ContourCell>& cells);

// bode ----------------------------------------------------------------------

struct BodePoint {
  double omega_rad = 0.0;
  double freq_hz = 0.0;
  double gain_db = 0.0;
  double phase_deg = 0.0;
};

struct BodeReport {
  std::string name;
  std::vector<BodePoint> points;
  bool is_spr = false;
  double max_abs_phase_deg = 0.0;
  bool phase_within_90 = false;
  /// (1/pi) * integral of ln|H| over (0, pi).
  double mean_log_gain = 0.0;
};

BodeReport cmd_bode(const NamedDag& dag, std::size_t grid = kDefaultSprGrid,
                    double sample_rate_hz = 2500.0, std::size_t quad = kDefaultQuadPoints);

/// omega_rad,freq_hz,gain_db,phase_deg
void write_bode_csv(std::ostream& os, const BodeReport& report);
/// name,is_spr,max_abs_phase_deg,phase_within_90,mean_log_gain
void write_bode_summary_csv(std::ostream& os, const std::vector<BodeReport>& reports);

// run / compare ---------------------------------------------------------------

struct RunSummary {
  std::string algorithm;
  std::string preset;
  double final_atten_db = 0.0;                 ///< NaN for sysid or diverged runs
  std::optional<double> seconds_to_threshold;  ///< feedforward only
  double final_param_err = 0.0;                ///< NaN for feedforward
  bool diverged = false;
  long divergence_step = -1;
  std::string warning;
};

struct CompareResult {
  std::vector<RunSummary> summaries;
  std::vector<RunTrace> traces;  ///< same order as summaries

  bool any_diverged() const;
};

/// Runs every (algorithm, preset) pair, in parallel, results in
/// algorithm-major order. Divergence is recorded per run.
CompareResult cmd_compare(const Experiment& ex);

/// Single run of one algorithm and one preset.
CompareResult cmd_run(const Experiment& ex, const AlgorithmSpec& algorithm, const NamedDag& preset);

/// algorithm,preset,final_atten_db,time_to_threshold_s,final_param_err,diverged,divergence_step
void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& rows);

/// Writes trace_<algorithm>_<preset>.csv for every run plus summary.csv.
void write_compare_outputs(const std::string& out_dir, const CompareResult& result);

}  // namespace vsdag
