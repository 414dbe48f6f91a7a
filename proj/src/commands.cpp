#include "vsdag/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>

#include "vsdag/csv.hpp"
#include "vsdag/errors.hpp"

namespace vsdag {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* yn(bool v) { return v ? "Y" : "N"; }

bool parse_yn(const std::string& s) {
  if (s == "Y" || s == "y" || s == "1") return true;
  if (s == "N" || s == "n" || s == "0") return false;
  throw ConfigError("expected Y or N, got '" + s + "'");
}

double parse_number(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("malformed number '" + s + "'");
  return v;
}

std::map<std::string, std::size_t> header_index(const std::string& header) {
  std::map<std::string, std::size_t> idx;
  const auto cols = split_csv_line(header);
  for (std::size_t i = 0; i < cols.size(); ++i) idx[cols[i]] = i;
  return idx;
}

RunSummary summarize(const std::string& alg, const std::string& preset, const RunTrace& tr,
                     double threshold_db) {
  RunSummary s;
  s.algorithm = alg;
  s.preset = preset;
  s.diverged = tr.diverged;
  s.divergence_step = tr.divergence_step;
  s.warning = tr.warning;
  s.final_atten_db = tr.attenuation_db.empty() ? kNaN : tr.attenuation_db.back();
  s.final_param_err = tr.param_err.empty() ? kNaN : tr.param_err.back();
  if (tr.kind == ScenarioKind::feedforward) s.seconds_to_threshold = seconds_to_threshold(tr, threshold_db);
  return s;
}

std::string file_safe(const std::string& s) {
  std::string out = s;
  for (char& ch : out)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  return out;
}

}  // namespace

std::vector<CheckRow> cmd_check(const std::vector<NamedDag>& dags, std::size_t grid,
                                std::size_t quad) {
  std::vector<CheckRow> rows;
  for (const auto& [name, cfg] : dags) {
    CheckRow r;
    r.name = name;
    r.c1 = cfg.c_at(1);
    r.c2 = cfg.c_at(2);
    r.d1p = cfg.d_prime_at(1);
    const TransferOperatord hdag = cfg.hdag();
    const SprVerdict spr = is_spr_numeric(hdag, grid);
    r.hdag_spr = spr.is_spr;
    r.min_re_hdag = spr.min_real_part;
    try {
      r.hpaa_pr = is_pr_unit_pole(cfg, grid).is_pr;
    } catch (const PreconditionError&) {
      r.hpaa_pr = false;
    }
    try {
      r.lemma1_integral = lemma1_integral(hdag, quad);
    } catch (const PreconditionError&) {
      r.lemma1_integral = kNaN;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_check_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
  os << "name,c1,c2,d1p,hdag_spr,hpaa_pr,min_re_hdag,lemma1_integral\n";
  for (const auto& r : rows)
    os << r.name << ',' << format_number(r.c1) << ',' << format_number(r.c2) << ','
       << format_number(r.d1p) << ',' << yn(r.hdag_spr) << ',' << yn(r.hpaa_pr) << ','
       << format_number(r.min_re_hdag) << ',' << format_number(r.lemma1_integral) << '\n';
}

std::vector<CheckRow> read_check_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty verdict table");
  auto idx = header_index(line);
  for (const char* col : {"name", "c1", "c2", "d1p", "hdag_spr", "hpaa_pr", "min_re_hdag",
                          "lemma1_integral"})
    if (!idx.count(col)) throw ConfigError(std::string("verdict table lacks column ") + col);
  std::vector<CheckRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < idx.size()) throw ConfigError("short row in verdict table: " + line);
    CheckRow r;
    r.name = cells[idx["name"]];
    r.c1 = parse_number(cells[idx["c1"]]);
    r.c2 = parse_number(cells[idx["c2"]]);
    r.d1p = parse_number(cells[idx["d1p"]]);
    r.hdag_spr = parse_yn(cells[idx["hdag_spr"]]);
    r.hpaa_pr = parse_yn(cells[idx["hpaa_pr"]]);
    r.min_re_hdag = parse_number(cells[idx["min_re_hdag"]]);
    r.lemma1_integral = parse_number(cells[idx["lemma1_integral"]]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::string> compare_verdicts(const std::vector<CheckRow>& rows, std::istream& expected) {
  std::string line;
  if (!std::getline(expected, line)) throw ConfigError("empty expected-verdict file");
  auto idx = header_index(line);
  for (const char* col : {"name", "hdag_spr", "hpaa_pr"})
    if (!idx.count(col)) throw ConfigError(std::string("expected-verdict file lacks column ") + col);

  std::vector<std::string> problems;
  std::map<std::string, const CheckRow*> by_name;
  for (const auto& r : rows) by_name[r.name] = &r;
  int lineno = 1;
  while (std::getline(expected, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < idx.size()) throw ConfigError("short row in expected-verdict file", lineno);
    const std::string& name = cells[idx["name"]];
    const auto it = by_name.find(name);
    if (it == by_name.end()) {
      problems.push_back(name + ": not computed");
      continue;
    }
    const bool spr = parse_yn(cells[idx["hdag_spr"]]);
    const bool pr = parse_yn(cells[idx["hpaa_pr"]]);
    if (spr != it->second->hdag_spr)
      problems.push_back(name + ": hdag_spr expected " + yn(spr) + ", got " + yn(!spr));
    if (pr != it->second->hpaa_pr)
      problems.push_back(name + ": hpaa_pr expected " + yn(pr) + ", got " + yn(!pr));
  }
  return problems;
}

std::vector<ContourCell> cmd_contour(double d1p, const GridAxis& c1_axis, const GridAxis& c2_axis,
                                     std::size_t grid) {
  const SprGrid spr = spr_region_grid(d1p, c1_axis, c2_axis);
  std::vector<ContourCell> cells;
  cells.reserve(c1_axis.count * c2_axis.count);
  for (std::size_t i = 0; i < c1_axis.count; ++i) {
    for (std::size_t j = 0; j < c2_axis.count; ++j) {
      ContourCell cell{c1_axis.at(i), c2_axis.at(j), spr.at(i, j), false};
      try {
        cell.pr_hpaa = is_pr_unit_pole(DagConfig::arima2(cell.c1, cell.c2, d1p), grid).is_pr;
      } catch (const PreconditionError&) {
        cell.pr_hpaa = false;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_contour_csv(std::ostream& os, const std::vector<ContourCell>& cells) {
  os << "c1,c2,spr_hdag,pr_hpaa\n";
  for (const auto& c : cells)
    os << format_number(c.c1) << ',' << format_number(c.c2) << ',' << (c.spr_hdag ? 1 : 0) << ','
       << (c.pr_hpaa ? 1 : 0) << '\n';
}

BodeReport cmd_bode(const NamedDag& dag, std::size_t grid, double sample_rate_hz,
                    std::size_t quad) {
  BodeReport rep;
  rep.name = dag.name;
  const TransferOperatord h = dag.cfg.hdag();
  rep.points.reserve(grid);
  for (double w : omega_grid(grid)) {
    const auto v = h.freq_response(w);
    BodePoint p{w, w * sample_rate_hz / (2.0 * std::numbers::pi), 20.0 * std::log10(std::abs(v)),
                std::arg(v) * 180.0 / std::numbers::pi};
    rep.max_abs_phase_deg = std::max(rep.max_abs_phase_deg, std::abs(p.phase_deg));
    rep.points.push_back(p);
  }
  rep.phase_within_90 = rep.max_abs_phase_deg < 90.0;
  rep.is_spr = is_spr_numeric(h, std::max<std::size_t>(grid, 256)).is_spr;
  rep.mean_log_gain = lemma1_integral(h, quad, Lemma1Check::skip) / std::numbers::pi;
  return rep;
}

void write_bode_csv(std::ostream& os, const BodeReport& report) {
  os << "omega_rad,freq_hz,gain_db,phase_deg\n";
  for (const auto& p : report.points)
    os << format_number(p.omega_rad) << ',' << format_number(p.freq_hz) << ','
       << format_number(p.gain_db) << ',' << format_number(p.phase_deg) << '\n';
}

void write_bode_summary_csv(std::ostream& os, const std::vector<BodeReport>& reports) {
  os << "name,is_spr,max_abs_phase_deg,phase_within_90,mean_log_gain\n";
  for (const auto& r : reports)
    os << r.name << ',' << yn(r.is_spr) << ',' << format_number(r.max_abs_phase_deg) << ','
       << yn(r.phase_within_90) << ',' << format_number(r.mean_log_gain) << '\n';
}

bool CompareResult::any_diverged() const {
  return std::any_of(summaries.begin(), summaries.end(), [](const auto& s) { return s.diverged; });
}

CompareResult cmd_compare(const Experiment& ex) {
  struct Job {
    const AlgorithmSpec* alg;
    const NamedDag* preset;
  };
  std::vector<Job> jobs;
  for (const auto& alg : ex.algorithms)
    for (const auto& preset : ex.presets) jobs.push_back({&alg, &preset});

  RunOptions opts;
  opts.throw_on_divergence = false;
  CompareResult out;
  out.traces.resize(jobs.size());
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < jobs.size(); start += width) {
    std::vector<std::future<RunTrace>> batch;
    for (std::size_t k = start; k < std::min(jobs.size(), start + width); ++k)
      batch.push_back(std::async(std::launch::async, [&ex, &opts, job = jobs[k]] {
        return run_scenario(ex.scenario, job.alg->policy, job.preset->cfg, opts);
      }));
    for (std::size_t k = 0; k < batch.size(); ++k) out.traces[start + k] = batch[k].get();
  }
  for (std::size_t k = 0; k < jobs.size(); ++k)
    out.summaries.push_back(
        summarize(jobs[k].alg->name, jobs[k].preset->name, out.traces[k], ex.threshold_db));
  return out;
}

CompareResult cmd_run(const Experiment& ex, const AlgorithmSpec& algorithm, const NamedDag& preset) {
  Experiment single = ex;
  single.algorithms = {algorithm};
  single.presets = {preset};
  return cmd_compare(single);
}

void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& rows) {
  os << "algorithm,preset,final_atten_db,time_to_threshold_s,final_param_err,diverged,divergence_step\n";
  for (const auto& r : rows)
    os << r.algorithm << ',' << r.preset << ',' << format_number(r.final_atten_db) << ','
       << (r.seconds_to_threshold ? format_number(*r.seconds_to_threshold) : std::string()) << ','
       << format_number(r.final_param_err) << ',' << yn(r.diverged) << ',' << r.divergence_step
       << '\n';
}

void write_compare_outputs(const std::string& out_dir, const CompareResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < result.traces.size(); ++k) {
    const auto& s = result.summaries[k];
    std::ofstream f(fs::path(out_dir) /
                    ("trace_" + file_safe(s.algorithm) + "_" + file_safe(s.preset) + ".csv"));
    if (!f) throw ConfigError("cannot write to output directory '" + out_dir + "'");
    write_trace_csv(f, result.traces[k]);
  }
  std::ofstream f(fs::path(out_dir) / "summary.csv");
  if (!f) throw ConfigError("cannot write to output directory '" + out_dir + "'");
  write_summary_csv(f, result.summaries);
}

}  // namespace vsdag
