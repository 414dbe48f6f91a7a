#include "vsdag/dag_config.hpp"

#include "vsdag/errors.hpp"

namespace vsdag {

DagConfig make_preset(const std::string& name) {
  if (name == "integral") return {};
  if (name == "conj_nesterov") return {{}, {0.9}};
  if (name == "ipd") return {{1.4, 0.5}, {}};
  if (name == "ip") return {{0.99}, {}};
  if (name == "arima2") return {{0.99, 0.0}, {0.9}};
  throw PreconditionError("unknown DAG preset '" + name + "'");
}

std::vector<NamedDag> table_presets() {
  std::vector<NamedDag> out;
  for (const char* name : {"integral", "conj_nesterov", "ipd", "ip", "arima2"})
    out.push_back({name, make_preset(name)});
  return out;
}

}  // namespace vsdag
