#include "vsdag/config_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "vsdag/errors.hpp"

namespace vsdag {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, int line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("expected a number, got '" + t + "'", line);
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> parse_list(const std::string& value, int line) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(item, line));
  if (out.empty()) throw ConfigError("expected a list of numbers", line);
  return out;
}

std::size_t parse_count(const std::string& value, int line) {
  const double v = parse_double(value, line);
  if (v < 0.0 || v != std::floor(v)) throw ConfigError("expected a non-negative integer", line);
  return std::size_t(v);
}

using Handler = std::function<void(const KeyValueFile::Entry&)>;

void dispatch(const KeyValueFile& file, const std::string& section,
              const std::map<std::string, Handler>& handlers) {
  if (!file.has_section(section)) return;
  for (const auto& entry : file.section(section)) {
    const auto it = handlers.find(entry.key);
    if (it == handlers.end())
      throw ConfigError("unknown key '" + entry.key + "' in [" + section + "]", entry.line);
    it->second(entry);
  }
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile out;
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto comment = s.find_first_of("#;");
    if (comment != std::string::npos) s.erase(comment);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      current = trim(s.substr(1, s.size() - 2));
      if (current.empty()) throw ConfigError("empty section name", line);
      if (out.sections_.count(current)) throw ConfigError("duplicate section [" + current + "]", line);
      out.sections_[current];
      out.section_lines_[current] = line;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    if (current.empty()) throw ConfigError("key outside of any section", line);
    Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError("empty key", line);
    for (const auto& prev : out.sections_[current])
      if (prev.key == e.key) throw ConfigError("duplicate key '" + e.key + "'", line);
    out.sections_[current].push_back(std::move(e));
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

const std::vector<KeyValueFile::Entry>& KeyValueFile::section(const std::string& name) const {
  static const std::vector<Entry> empty;
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

std::vector<std::string> KeyValueFile::section_names() const {
  std::vector<std::string> out;
  for (const auto& [name, entries] : sections_) out.push_back(name);
  return out;
}

int KeyValueFile::section_line(const std::string& name) const {
  const auto it = section_lines_.find(name);
  return it == section_lines_.end() ? 0 : it->second;
}

std::vector<AlgorithmSpec> default_algorithms() {
  return {{"lms", Policy::constant(0.2)},
          {"nlms", Policy::normalized(0.0002)},
          {"plms", Policy::posterior(0.22)}};
}

std::vector<NamedDag> load_dag_list(const KeyValueFile& file) {
  if (!file.has_section("presets")) return table_presets();
  std::vector<NamedDag> out;
  for (const auto& e : file.section("presets")) {
    if (e.key == "use") {
      for (const auto& name : split_list(e.value)) {
        try {
          out.push_back({name, make_preset(name)});
        } catch (const PreconditionError& err) {
          throw ConfigError(err.what(), e.line);
        }
      }
    } else {
      const auto v = parse_list(e.value, e.line);
      if (v.size() != 3) throw ConfigError("custom DAG needs 'c1, c2, d1p'", e.line);
      out.push_back({e.key, DagConfig::arima2(v[0], v[1], v[2])});
    }
  }
  if (out.empty()) throw ConfigError("[presets] lists no DAG", file.section_line("presets"));
  return out;
}

Experiment load_experiment(const KeyValueFile& file) {
  Experiment ex;

  ScenarioKind kind = ScenarioKind::feedforward;
  int kind_line = 0;
  for (const auto& e : file.section("scenario")) {
    if (e.key != "kind") continue;
    kind_line = e.line;
    if (e.value == "sysid") kind = ScenarioKind::sysid;
    else if (e.value == "feedforward") kind = ScenarioKind::feedforward;
    else throw ConfigError("scenario kind must be sysid or feedforward", e.line);
  }
  ScenarioConfig& scn = ex.scenario;
  scn = kind == ScenarioKind::sysid ? default_sysid_scenario() : default_feedforward_scenario();

  std::optional<double> duration_s, prefix_s;
  int duration_line = kind_line, params_line = kind_line;
  bool params_set = false;

  dispatch(file, "scenario",
           {{"kind", [](const auto&) {}},
            {"sample_rate_hz", [&](const auto& e) { scn.noise.sample_rate_hz = parse_double(e.value, e.line); }},
            {"duration_s", [&](const auto& e) { duration_s = parse_double(e.value, e.line); duration_line = e.line; }},
            {"duration_samples", [&](const auto& e) { scn.duration_samples = parse_count(e.value, e.line); duration_line = e.line; }},
            {"open_loop_prefix_s", [&](const auto& e) { prefix_s = parse_double(e.value, e.line); }},
            {"open_loop_prefix_samples", [&](const auto& e) { scn.open_loop_prefix_samples = parse_count(e.value, e.line); }},
            {"window_s", [&](const auto& e) { scn.window_seconds = parse_double(e.value, e.line); }},
            {"adaptive_params", [&](const auto& e) {
               scn.n_adaptive_params = parse_count(e.value, e.line);
               params_line = e.line;
               params_set = true;
             }},
            {"measurement_noise_rms", [&](const auto& e) { scn.measurement_noise_rms = parse_double(e.value, e.line); }},
            {"seed", [&](const auto& e) { scn.noise.seed = parse_count(e.value, e.line); }},
            {"true_params", [&](const auto& e) {
               const auto v = parse_list(e.value, e.line);
               scn.true_params = Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
               if (!params_set) scn.n_adaptive_params = v.size();
               params_line = e.line;
             }}});

  dispatch(file, "disturbance",
           {{"kind", [&](const auto& e) {
               if (e.value == "white") scn.noise.kind = NoiseKind::white;
               else if (e.value == "bandpass") scn.noise.kind = NoiseKind::bandpass;
               else throw ConfigError("disturbance kind must be white or bandpass", e.line);
             }},
            {"band_low_hz", [&](const auto& e) { scn.noise.band_low_hz = parse_double(e.value, e.line); }},
            {"band_high_hz", [&](const auto& e) { scn.noise.band_high_hz = parse_double(e.value, e.line); }},
            {"amplitude", [&](const auto& e) { scn.noise.amplitude = parse_double(e.value, e.line); }}});

  std::map<std::string, std::pair<std::vector<double>, int>> path_coeffs;
  std::map<std::string, Handler> path_handlers;
  for (const char* key : {"primary_num", "primary_den", "secondary_num", "secondary_den",
                          "model_num", "model_den", "filter_num", "filter_den"})
    path_handlers[key] = [&path_coeffs](const KeyValueFile::Entry& e) {
      path_coeffs[e.key] = {parse_list(e.value, e.line), e.line};
    };
  dispatch(file, "paths", path_handlers);

  auto build = [&](const std::string& name, const TransferOperatord& fallback) {
    const auto num = path_coeffs.find(name + "_num");
    const auto den = path_coeffs.find(name + "_den");
    if (num == path_coeffs.end() && den == path_coeffs.end()) return fallback;
    const int line = num != path_coeffs.end() ? num->second.second : den->second.second;
    try {
      return TransferOperatord(
          num != path_coeffs.end() ? Polynomiald::from_vector(num->second.first) : Polynomiald{1.0},
          den != path_coeffs.end() ? Polynomiald::from_vector(den->second.first) : Polynomiald{1.0});
    } catch (const PreconditionError& err) {
      throw ConfigError(name + " path: " + err.what(), line);
    }
  };
  const bool model_given = path_coeffs.count("model_num") || path_coeffs.count("model_den");
  const bool filter_given = path_coeffs.count("filter_num") || path_coeffs.count("filter_den");
  scn.primary_path = build("primary", scn.primary_path);
  scn.secondary_path = build("secondary", scn.secondary_path);
  scn.secondary_model = build("model", model_given ? scn.secondary_model : scn.secondary_path);
  scn.regressor_filter = build("filter", filter_given ? scn.regressor_filter : scn.secondary_model);

  if (file.has_section("algorithms")) {
    double delta = 1e-16;
    std::vector<std::pair<AlgorithmSpec, int>> algs;
    for (const auto& e : file.section("algorithms")) {
      if (e.key == "nlms_delta") {
        delta = parse_double(e.value, e.line);
        continue;
      }
      StepKind k;
      try {
        k = parse_step_kind(e.key);
      } catch (const PreconditionError& err) {
        throw ConfigError(err.what(), e.line);
      }
      algs.push_back({{e.key, {k, parse_double(e.value, e.line), delta}}, e.line});
    }
    for (auto& [spec, line] : algs) {
      if (spec.policy.kind == StepKind::normalized) spec.policy.delta = delta;
      try {
        spec.policy.validate();
      } catch (const PreconditionError& err) {
        throw ConfigError(err.what(), line);
      }
      ex.algorithms.push_back(spec);
    }
    if (ex.algorithms.empty())
      throw ConfigError("[algorithms] lists no algorithm", file.section_line("algorithms"));
  } else {
    ex.algorithms = default_algorithms();
  }

  ex.presets = load_dag_list(file);

  dispatch(file, "compare",
           {{"threshold_db", [&](const auto& e) { ex.threshold_db = parse_double(e.value, e.line); }}});

  for (const auto& name : file.section_names())
    if (name != "scenario" && name != "disturbance" && name != "paths" && name != "algorithms" &&
        name != "presets" && name != "compare")
      throw ConfigError("unknown section [" + name + "]", file.section_line(name));

  const double fs = scn.noise.sample_rate_hz;
  if (duration_s) scn.duration_samples = std::size_t(std::llround(*duration_s * fs));
  if (prefix_s) scn.open_loop_prefix_samples = std::size_t(std::llround(*prefix_s * fs));
  if (scn.duration_samples <= scn.open_loop_prefix_samples)
    throw ConfigError("duration must exceed the open-loop prefix", duration_line);
  if (scn.kind == ScenarioKind::sysid && std::size_t(scn.true_params.size()) != scn.n_adaptive_params)
    throw ConfigError("sysid needs as many true parameters as adaptive parameters", params_line);
  try {
    scn.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(err.what(), file.section_line("scenario"));
  }
  return ex;
}

Experiment load_experiment_file(const std::string& path) {
  return load_experiment(KeyValueFile::load(path));
}

}  // namespace vsdag
