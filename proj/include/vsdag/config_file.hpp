#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsdag/dag_config.hpp"
#include "vsdag/sim.hpp"

namespace vsdag {

/// Parsed `[section]` / `key = value` file. `#` and `;` start comments.
/// Entries keep file order and their line numbers.
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::string& path);

  const std::vector<Entry>& section(const std::string& name) const;
  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }
  std::vector<std::string> section_names() const;
  int section_line(const std::string& name) const;

 private:
  std::map<std::string, std::vector<Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

struct AlgorithmSpec {
  std::string name;
  Policy policy;
};

/// Everything the run/compare commands need.
struct Experiment {
  ScenarioConfig scenario;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<NamedDag> presets;
  double threshold_db = 20.0;
};

/// Default algorithm list: LMS mu = 0.2, NLMS mu = 0.0002, PLMS mu = 0.22.
std::vector<AlgorithmSpec> default_algorithms();

/// Builds an experiment; every error is a ConfigError carrying the line.
///
/// Sections and keys:
///   [scenario]     kind (sysid|feedforward), sample_rate_hz, duration_s or
///                  duration_samples, open_loop_prefix_s or
///                  open_loop_prefix_samples, window_s, adaptive_params,
///                  measurement_noise_rms, seed, true_params (list)
///   [disturbance]  kind (white|bandpass), band_low_hz, band_high_hz, amplitude
///   [paths]        primary_num/den, secondary_num/den, model_num/den,
///                  filter_num/den (coefficient lists; model defaults to
///                  secondary, filter to model)
///   [algorithms]   lms|nlms|plms = mu (file order kept), nlms_delta
///   [presets]      use = name list; any other key = c1, c2, d1p
///   [compare]      threshold_db
/// Omitted keys keep the built-in default scenario of the chosen kind.
Experiment load_experiment(const KeyValueFile& file);
Experiment load_experiment_file(const std::string& path);

/// Custom DAG rows from a [presets] section (for the check command); the
/// default table when the file has no such section.
std::vector<NamedDag> load_dag_list(const KeyValueFile& file);

}  // namespace vsdag
