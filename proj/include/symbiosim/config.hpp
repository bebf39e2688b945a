#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symbiosim/kinds.hpp"
#include "symbiosim/params.hpp"

namespace symbiosim {

// Fully resolved run configuration. Simulation keys use the conventional
// short symbols (p, T, d, f, N_Cu, ...); see kConfigKeysDoc in config.cpp
// for the complete list.
struct RunConfig {
  SimParams params;

  // Orchestration.
  int replications = 200;
  int truth_replications = 0;  // 0 -> same as replications
  int threads = 1;
  std::vector<DesignKind> designs{DesignKind::naive};
  std::vector<std::pair<RecommenderKind, RecommenderKind>> pairs{
      {RecommenderKind::user_cf, RecommenderKind::random}};
  std::vector<RecommenderKind> algos{RecommenderKind::oracle, RecommenderKind::random,
                                     RecommenderKind::item_cf, RecommenderKind::user_cf};
  std::vector<double> gamma_pref_values{1.0, 10.0};
  std::vector<double> p_values{0.5};
  std::string out_dir = "results";
  int verify_instances = 100;

  // Theory inputs.
  std::string graph_path;
  std::string clusters_path;
  std::string bipartite_path;
  std::string ext_params_path;
  double gamma00 = 0.0, gamma01 = 0.0, gamma10 = 0.0, gamma11 = 0.0;
  double beta0 = 0.0, beta1 = 0.0;
  double delta0 = 0.0, delta1 = 0.0;
  double corpus = 0.0;  // M
};

// Resolution order: built-in defaults, then the config file (if any), then
// each override in sequence. Unknown keys and malformed values are hard
// errors; the resolved SimParams are validated before returning.
RunConfig parse_config(const std::string* file_path,
                       const std::vector<std::string>& overrides);

// Applies one "key=value" or "key = value" assignment.
void apply_assignment(RunConfig& cfg, const std::string& line);

// Every key with its resolved value, in a fixed order; this is the config
// echo written to metadata sidecars (and is itself parseable as a config).
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

}  // namespace symbiosim
