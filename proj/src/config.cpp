#include "symbiosim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "symbiosim/csv.hpp"

namespace symbiosim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("bad value for '" + key + "': '" + value + "'");
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& part : split_list(value)) out.push_back(parse_real(key, part));
  if (out.empty()) bad_value(key, value);
  return out;
}

std::pair<RecommenderKind, RecommenderKind> parse_pair(const std::string& key,
                                                       const std::string& value) {
  const auto slash = value.find('/');
  if (slash == std::string::npos) bad_value(key, value);
  return {recommender_from_string(trim(value.substr(0, slash))),
          recommender_from_string(trim(value.substr(slash + 1)))};
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

std::string format_u64(std::uint64_t value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace

void apply_assignment(RunConfig& cfg, const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("expected key = value, got '" + line + "'");
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw std::invalid_argument("empty key in '" + line + "'");

  SimParams& p = cfg.params;
  if (key == "p") {
    p.split_prob = parse_real(key, value);
  } else if (key == "N_Ci") {
    p.n_item_clusters = static_cast<int>(parse_int(key, value));
  } else if (key == "N_Cu") {
    p.n_user_clusters = static_cast<int>(parse_int(key, value));
  } else if (key == "alpha_u") {
    p.alpha_user = parse_real(key, value);
  } else if (key == "alpha_i") {
    p.alpha_item = parse_real(key, value);
  } else if (key == "gamma_pref") {
    p.gamma_pref = parse_real(key, value);
  } else if (key == "gamma_item") {
    p.gamma_item = parse_real(key, value);
  } else if (key == "T") {
    p.periods = static_cast<int>(parse_int(key, value));
  } else if (key == "t_init") {
    p.t_init = static_cast<int>(parse_int(key, value));
  } else if (key == "d") {
    p.rank_decay = parse_real(key, value);
  } else if (key == "f") {
    p.retrain_every = static_cast<int>(parse_int(key, value));
  } else if (key == "n_items") {
    p.n_items = static_cast<int>(parse_int(key, value));
  } else if (key == "n_users") {
    p.n_users = static_cast<int>(parse_int(key, value));
  } else if (key == "sigma_util") {
    p.sigma_util = parse_real(key, value);
  } else if (key == "seed") {
    p.seed = parse_u64(key, value);
  } else if (key == "take_up_post_randomization_only") {
    p.take_up_post_randomization_only = parse_bool(key, value);
  } else if (key == "replications") {
    cfg.replications = static_cast<int>(parse_int(key, value));
  } else if (key == "truth_replications") {
    cfg.truth_replications = static_cast<int>(parse_int(key, value));
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_int(key, value));
  } else if (key == "designs") {
    cfg.designs.clear();
    for (const std::string& part : split_list(value)) {
      cfg.designs.push_back(design_from_string(part));
    }
    if (cfg.designs.empty()) bad_value(key, value);
  } else if (key == "pairs") {
    cfg.pairs.clear();
    for (const std::string& part : split_list(value)) {
      cfg.pairs.push_back(parse_pair(key, part));
    }
    if (cfg.pairs.empty()) bad_value(key, value);
  } else if (key == "algos") {
    cfg.algos.clear();
    for (const std::string& part : split_list(value)) {
      cfg.algos.push_back(recommender_from_string(part));
    }
    if (cfg.algos.empty()) bad_value(key, value);
  } else if (key == "gamma_pref_values") {
    cfg.gamma_pref_values = parse_real_list(key, value);
  } else if (key == "p_values") {
    cfg.p_values = parse_real_list(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "verify_instances") {
    cfg.verify_instances = static_cast<int>(parse_int(key, value));
  } else if (key == "graph") {
    cfg.graph_path = value;
  } else if (key == "clusters") {
    cfg.clusters_path = value;
  } else if (key == "bipartite") {
    cfg.bipartite_path = value;
  } else if (key == "ext_params") {
    cfg.ext_params_path = value;
  } else if (key == "gamma_00") {
    cfg.gamma00 = parse_real(key, value);
  } else if (key == "gamma_01") {
    cfg.gamma01 = parse_real(key, value);
  } else if (key == "gamma_10") {
    cfg.gamma10 = parse_real(key, value);
  } else if (key == "gamma_11") {
    cfg.gamma11 = parse_real(key, value);
  } else if (key == "beta_0") {
    cfg.beta0 = parse_real(key, value);
  } else if (key == "beta_1") {
    cfg.beta1 = parse_real(key, value);
  } else if (key == "delta_0") {
    cfg.delta0 = parse_real(key, value);
  } else if (key == "delta_1") {
    cfg.delta1 = parse_real(key, value);
  } else if (key == "M") {
    cfg.corpus = parse_real(key, value);
  } else {
    throw std::invalid_argument("unknown configuration key: '" + key + "'");
  }
}

RunConfig parse_config(const std::string* file_path,
                       const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (file_path) {
    std::ifstream in(*file_path);
    if (!in) throw std::runtime_error("cannot read config file: " + *file_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string stripped = trim(line);
      if (stripped.empty() || stripped[0] == '#') continue;
      try {
        apply_assignment(cfg, stripped);
      } catch (const std::exception& e) {
        throw std::invalid_argument(*file_path + ":" + std::to_string(line_no) + ": " +
                                    e.what());
      }
    }
  }
  for (const std::string& assignment : overrides) {
    apply_assignment(cfg, assignment);
  }
  cfg.params.validate();
  if (cfg.replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (cfg.truth_replications < 0) {
    throw std::invalid_argument("truth_replications must be nonnegative");
  }
  if (cfg.threads < 0) throw std::invalid_argument("threads must be nonnegative");
  if (cfg.verify_instances < 1) {
    throw std::invalid_argument("verify_instances must be at least 1");
  }
  for (double v : cfg.p_values) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("p_values must lie in (0,1)");
  }
  for (double v : cfg.gamma_pref_values) {
    if (v <= 0.0) throw std::invalid_argument("gamma_pref_values must be positive");
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
  const SimParams& p = cfg.params;
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("p", format_double(p.split_prob));
  kv.emplace_back("N_Ci", format_int(p.n_item_clusters));
  kv.emplace_back("N_Cu", format_int(p.n_user_clusters));
  kv.emplace_back("alpha_u", format_double(p.alpha_user));
  kv.emplace_back("alpha_i", format_double(p.alpha_item));
  kv.emplace_back("gamma_pref", format_double(p.gamma_pref));
  kv.emplace_back("gamma_item", format_double(p.gamma_item));
  kv.emplace_back("T", format_int(p.periods));
  kv.emplace_back("t_init", format_int(p.t_init));
  kv.emplace_back("d", format_double(p.rank_decay));
  kv.emplace_back("f", format_int(p.retrain_every));
  kv.emplace_back("n_items", format_int(p.n_items));
  kv.emplace_back("n_users", format_int(p.n_users));
  kv.emplace_back("sigma_util", format_double(p.sigma_util));
  kv.emplace_back("seed", format_u64(p.seed));
  kv.emplace_back("take_up_post_randomization_only",
                  p.take_up_post_randomization_only ? "true" : "false");
  kv.emplace_back("replications", format_int(cfg.replications));
  kv.emplace_back("truth_replications", format_int(cfg.truth_replications));
  kv.emplace_back("threads", format_int(cfg.threads));
  {
    std::vector<std::string> names;
    for (DesignKind d : cfg.designs) names.emplace_back(to_string(d));
    kv.emplace_back("designs", join(names));
  }
  {
    std::vector<std::string> names;
    for (const auto& [t, c] : cfg.pairs) {
      names.push_back(std::string(to_string(t)) + "/" + std::string(to_string(c)));
    }
    kv.emplace_back("pairs", join(names));
  }
  {
    std::vector<std::string> names;
    for (RecommenderKind a : cfg.algos) names.emplace_back(to_string(a));
    kv.emplace_back("algos", join(names));
  }
  {
    std::vector<std::string> vals;
    for (double v : cfg.gamma_pref_values) vals.push_back(format_double(v));
    kv.emplace_back("gamma_pref_values", join(vals));
  }
  {
    std::vector<std::string> vals;
    for (double v : cfg.p_values) vals.push_back(format_double(v));
    kv.emplace_back("p_values", join(vals));
  }
  kv.emplace_back("out", cfg.out_dir);
  kv.emplace_back("verify_instances", format_int(cfg.verify_instances));
  if (!cfg.graph_path.empty()) kv.emplace_back("graph", cfg.graph_path);
  if (!cfg.clusters_path.empty()) kv.emplace_back("clusters", cfg.clusters_path);
  if (!cfg.bipartite_path.empty()) kv.emplace_back("bipartite", cfg.bipartite_path);
  if (!cfg.ext_params_path.empty()) kv.emplace_back("ext_params", cfg.ext_params_path);
  kv.emplace_back("gamma_00", format_double(cfg.gamma00));
  kv.emplace_back("gamma_01", format_double(cfg.gamma01));
  kv.emplace_back("gamma_10", format_double(cfg.gamma10));
  kv.emplace_back("gamma_11", format_double(cfg.gamma11));
  kv.emplace_back("beta_0", format_double(cfg.beta0));
  kv.emplace_back("beta_1", format_double(cfg.beta1));
  kv.emplace_back("delta_0", format_double(cfg.delta0));
  kv.emplace_back("delta_1", format_double(cfg.delta1));
  kv.emplace_back("M", format_double(cfg.corpus));
  return kv;
}

}  // namespace symbiosim
