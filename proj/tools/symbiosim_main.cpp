#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symbiosim/config.hpp"
#include "symbiosim/csv.hpp"
#include "symbiosim/engine.hpp"
#include "symbiosim/theory.hpp"
#include "symbiosim/verify.hpp"
#include "symbiosim/version.hpp"

namespace {

using namespace symbiosim;

namespace fs = std::filesystem;

constexpr int kExitError = 1;
constexpr int kExitVerifyFailed = 2;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

const std::vector<std::string> kReplicationColumns = {
    "replication", "design", "algo_t", "algo_c", "p",
    "gamma_pref",  "take_up_t", "take_up_c", "tte_hat"};

const std::vector<std::string> kSummaryColumns = {
    "design",        "algo_t",        "algo_c",        "p",
    "gamma_pref",    "replications",  "take_up_t_mean", "take_up_t_se",
    "take_up_c_mean", "take_up_c_se", "tte_hat_mean",  "tte_hat_se",
    "tte_ci_low",    "tte_ci_high",   "truth_t",       "truth_t_se",
    "truth_c",       "truth_c_se",    "bias_t",        "bias_c",
    "bias_tte"};

void write_replication_rows(CsvWriter& writer, const BiasReport& report) {
  for (int r = 0; r < report.replications; ++r) {
    writer.row({format_int(r), std::string(to_string(report.design)),
                std::string(to_string(report.algo_treatment)),
                std::string(to_string(report.algo_control)),
                format_double(report.split_prob), format_double(report.gamma_pref),
                format_double(report.take_up_treatment[r]),
                format_double(report.take_up_control[r]),
                format_double(report.tte_hats[r])});
  }
}

void write_summary_row(CsvWriter& writer, const BiasReport& report) {
  writer.row({std::string(to_string(report.design)),
              std::string(to_string(report.algo_treatment)),
              std::string(to_string(report.algo_control)),
              format_double(report.split_prob), format_double(report.gamma_pref),
              format_int(report.replications),
              format_double(report.take_up_treatment_mean),
              format_double(report.take_up_treatment_se),
              format_double(report.take_up_control_mean),
              format_double(report.take_up_control_se), format_double(report.tte_mean),
              format_double(report.tte_se), format_double(report.tte_ci_low),
              format_double(report.tte_ci_high), format_double(report.truth_treatment.mean),
              format_double(report.truth_treatment.se),
              format_double(report.truth_control.mean),
              format_double(report.truth_control.se), format_double(report.bias_treatment),
              format_double(report.bias_control), format_double(report.bias_tte)});
}

McOptions mc_options(const RunConfig& cfg) {
  McOptions opts;
  opts.replications = cfg.replications;
  opts.truth_replications = cfg.truth_replications;
  opts.threads = cfg.threads;
  return opts;
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.designs.size() != 1 || cfg.pairs.size() != 1) {
    throw std::invalid_argument(
        "simulate runs exactly one design and one algorithm pair; use sweep for grids");
  }
  const BiasReport report = monte_carlo(cfg.params, cfg.designs[0], cfg.pairs[0].first,
                                        cfg.pairs[0].second, mc_options(cfg));
  OutputGuard guard;
  const std::string rows_path = out_path(cfg, "simulate.csv");
  const std::string summary_path = out_path(cfg, "simulate_summary.csv");
  const std::string meta_path = out_path(cfg, "simulate.meta");
  guard.track(rows_path);
  guard.track(summary_path);
  guard.track(meta_path);
  {
    CsvWriter rows(rows_path, kReplicationColumns);
    write_replication_rows(rows, report);
    rows.flush();
    CsvWriter summary(summary_path, kSummaryColumns);
    write_summary_row(summary, report);
    summary.flush();
    write_metadata(meta_path, cfg, "simulate");
  }
  guard.keep();
  std::cout << "simulate: " << to_string(report.algo_treatment) << " vs "
            << to_string(report.algo_control) << " under " << to_string(report.design)
            << ": tte_hat mean " << format_double(report.tte_mean) << " (se "
            << format_double(report.tte_se) << "), bias_tte "
            << format_double(report.bias_tte) << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  OutputGuard guard;
  const std::string rows_path = out_path(cfg, "sweep.csv");
  const std::string summary_path = out_path(cfg, "sweep_summary.csv");
  const std::string meta_path = out_path(cfg, "sweep.meta");
  guard.track(rows_path);
  guard.track(summary_path);
  guard.track(meta_path);
  {
    CsvWriter rows(rows_path, kReplicationColumns);
    CsvWriter summary(summary_path, kSummaryColumns);
    for (double gamma_pref : cfg.gamma_pref_values) {
      // Truths depend on gamma_pref but not on the split or design (a naive
      // A/A run is assignment-independent), so cache them per algorithm.
      std::map<RecommenderKind, TruthEstimate> truths;
      for (double p : cfg.p_values) {
        SimParams params = cfg.params;
        params.gamma_pref = gamma_pref;
        params.split_prob = p;
        const int truth_reps =
            cfg.truth_replications > 0 ? cfg.truth_replications : cfg.replications;
        const std::uint64_t truth_base = derive_stream_seed(params.seed, kTruthSalt);
        for (const auto& [algo_t, algo_c] : cfg.pairs) {
          for (RecommenderKind algo : {algo_t, algo_c}) {
            if (!truths.count(algo)) {
              truths[algo] =
                  true_counterfactual(params, algo, truth_reps, truth_base, cfg.threads);
            }
          }
          for (DesignKind design : cfg.designs) {
            McOptions opts = mc_options(cfg);
            opts.truth_treatment = &truths[algo_t];
            opts.truth_control = &truths[algo_c];
            const BiasReport report =
                monte_carlo(params, design, algo_t, algo_c, opts);
            write_replication_rows(rows, report);
            write_summary_row(summary, report);
            std::cout << "sweep: gamma_pref " << format_double(gamma_pref) << " p "
                      << format_double(p) << " " << to_string(design) << " "
                      << to_string(algo_t) << "/" << to_string(algo_c) << " bias_tte "
                      << format_double(report.bias_tte) << "\n";
          }
        }
      }
    }
    rows.flush();
    summary.flush();
    write_metadata(meta_path, cfg, "sweep");
  }
  guard.keep();
  return 0;
}

int cmd_counterfactual(const RunConfig& cfg) {
  OutputGuard guard;
  const std::string table_path = out_path(cfg, "counterfactual.csv");
  const std::string meta_path = out_path(cfg, "counterfactual.meta");
  guard.track(table_path);
  guard.track(meta_path);
  {
    CsvWriter table(table_path, {"algo", "replications", "mean", "se"});
    const int reps = cfg.truth_replications > 0 ? cfg.truth_replications : cfg.replications;
    const std::uint64_t truth_base = derive_stream_seed(cfg.params.seed, kTruthSalt);
    for (RecommenderKind algo : cfg.algos) {
      const TruthEstimate truth =
          true_counterfactual(cfg.params, algo, reps, truth_base, cfg.threads);
      table.row({std::string(to_string(algo)), format_int(truth.replications),
                 format_double(truth.mean), format_double(truth.se)});
      std::cout << "counterfactual: " << to_string(algo) << " take-up "
                << format_double(truth.mean) << " (se " << format_double(truth.se)
                << ")\n";
    }
    table.flush();
    write_metadata(meta_path, cfg, "counterfactual");
  }
  guard.keep();
  return 0;
}

// --- theory input files ---------------------------------------------------

std::vector<std::vector<double>> read_numeric_lines(const std::string& path,
                                                    std::size_t min_fields,
                                                    std::size_t max_fields) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream fields(line);
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (row.empty()) continue;
    if (row.size() < min_fields || row.size() > max_fields) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(min_fields) + " fields");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

TheoryInstance load_theory_instance(const RunConfig& cfg) {
  if (cfg.graph_path.empty() == cfg.bipartite_path.empty()) {
    throw std::invalid_argument("theory needs exactly one of 'graph' or 'bipartite'");
  }
  if (cfg.clusters_path.empty()) {
    throw std::invalid_argument(
        "theory needs a 'clusters' file (one 'unit cluster' pair per line)");
  }

  TheoryInstance inst;
  const auto cluster_rows = read_numeric_lines(cfg.clusters_path, 2, 2);
  int n = 0;
  for (const auto& row : cluster_rows) n = std::max(n, static_cast<int>(row[0]) + 1);

  if (!cfg.graph_path.empty()) {
    const auto edges = read_numeric_lines(cfg.graph_path, 3, 3);
    for (const auto& e : edges) {
      n = std::max({n, static_cast<int>(e[0]) + 1, static_cast<int>(e[1]) + 1});
    }
    inst.n = n;
    inst.w.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& e : edges) {
      inst.w[static_cast<std::size_t>(e[0]) * n + static_cast<std::size_t>(e[1])] += e[2];
    }
  } else {
    const auto links = read_numeric_lines(cfg.bipartite_path, 2, 2);
    int n_items = 0;
    for (const auto& l : links) {
      n = std::max(n, static_cast<int>(l[0]) + 1);
      n_items = std::max(n_items, static_cast<int>(l[1]) + 1);
    }
    std::vector<std::uint8_t> incidence(static_cast<std::size_t>(n) * n_items, 0);
    for (const auto& l : links) {
      incidence[static_cast<std::size_t>(l[0]) * n_items + static_cast<std::size_t>(l[1])] = 1;
    }
    inst.n = n;
    inst.w = fold_bipartite_graph(incidence, n, n_items);
  }

  inst.clusters.assign(inst.n, 0);
  for (const auto& row : cluster_rows) {
    inst.clusters[static_cast<int>(row[0])] = static_cast<int>(row[1]);
  }
  inst.gamma[0][0] = cfg.gamma00;
  inst.gamma[0][1] = cfg.gamma01;
  inst.gamma[1][0] = cfg.gamma10;
  inst.gamma[1][1] = cfg.gamma11;
  inst.beta = {cfg.beta0, cfg.beta1};
  inst.delta = {cfg.delta0, cfg.delta1};
  inst.corpus = cfg.corpus;
  inst.split_prob = cfg.params.split_prob;
  inst.validate();
  return inst;
}

int cmd_theory(const RunConfig& cfg) {
  const TheoryInstance inst = load_theory_instance(cfg);
  OutputGuard guard;
  const std::string table_path = out_path(cfg, "theory.csv");
  const std::string extras_path = out_path(cfg, "theory_extras.csv");
  const std::string meta_path = out_path(cfg, "theory.meta");
  guard.track(table_path);
  guard.track(extras_path);
  guard.track(meta_path);
  {
    CsvWriter table(table_path, {"design", "closed_form", "brute_force", "abs_diff"});
    for (DesignKind design : kAllDesigns) {
      const double closed = bias_closed_form(inst, design);
      const int bits =
          design == DesignKind::clustered ? inst.cluster_count() : inst.n;
      double brute = std::numeric_limits<double>::quiet_NaN();
      if (bits <= 20) {
        brute = brute_force_bias(inst, design);
      } else {
        std::cerr << "theory: skipping brute force for " << to_string(design) << " ("
                  << bits << " enumeration bits exceed the 2^20 cap)\n";
      }
      table.row({std::string(to_string(design)), format_double(closed),
                 format_double(brute), format_double(std::fabs(closed - brute))});
    }
    table.flush();

    CsvWriter extras(extras_path, {"metric", "value"});
    extras.row({"tte", format_double(compute_tte(inst))});
    extras.row({"design_bias_gap", format_double(design_bias_gap(inst))});
    extras.row({"cluster_cut_quality",
                format_double(cluster_cut_quality(inst.w, inst.clusters))});
    const int k = inst.cluster_count();
    extras.row({"rmse_inflation", format_double(rmse_inflation(inst.n, k))});
    if (rmse_inflation_degenerate(k)) {
      std::cerr << "theory: single cluster cannot be randomized; rmse_inflation is "
                   "degenerate\n";
    }
    if (!cfg.ext_params_path.empty()) {
      const auto rows = read_numeric_lines(cfg.ext_params_path, 5, 5);
      ExtendedInstance ext;
      ext.n = inst.n;
      ext.w = inst.w;
      ext.clusters = inst.clusters;
      ext.split_prob = inst.split_prob;
      ext.alpha.assign(ext.n, 0.0);
      ext.beta.assign(ext.n, 0.0);
      ext.gamma.assign(ext.n, 0.0);
      ext.delta.assign(ext.n, 0.0);
      for (const auto& row : rows) {
        const int i = static_cast<int>(row[0]);
        if (i < 0 || i >= ext.n) throw std::runtime_error("ext_params unit out of range");
        ext.alpha[i] = row[1];
        ext.beta[i] = row[2];
        ext.gamma[i] = row[3];
        ext.delta[i] = row[4];
      }
      extras.row({"extended_cluster_bias", format_double(extended_cluster_bias(ext))});
      extras.row({"extended_cluster_bias_normalized",
                  format_double(extended_cluster_bias(ext, true))});
    }
    extras.flush();
    write_metadata(meta_path, cfg, "theory");
  }
  guard.keep();
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const VerifyResult result = run_verification(cfg.verify_instances, cfg.params.seed);
  OutputGuard guard;
  const std::string table_path = out_path(cfg, "verify.csv");
  const std::string meta_path = out_path(cfg, "verify.meta");
  guard.track(table_path);
  guard.track(meta_path);
  {
    CsvWriter table(table_path,
                    {"instance", "check", "lhs", "rhs", "abs_diff", "tolerance", "pass"});
    for (const VerifyRow& row : result.rows) {
      table.row({format_int(row.instance), row.check, format_double(row.lhs),
                 format_double(row.rhs), format_double(row.abs_diff),
                 format_double(row.tolerance), row.pass ? "1" : "0"});
    }
    table.flush();
    write_metadata(meta_path, cfg, "verify");
  }
  guard.keep();
  std::cout << "verify: " << result.rows.size() << " checks over " << cfg.verify_instances
            << " random instances, " << result.failures << " failures\n";
  if (!result.all_pass) {
    for (const VerifyRow& row : result.rows) {
      if (!row.pass) {
        std::cout << "  FAIL instance " << row.instance << " " << row.check << ": |"
                  << format_double(row.lhs) << " - " << format_double(row.rhs)
                  << "| = " << format_double(row.abs_diff) << " > "
                  << format_double(row.tolerance) << "\n";
      }
    }
    return kExitVerifyFailed;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbiosim: A/B-test symbiosis-bias lab (simulation + theory oracle)"};
  app.set_version_flag("--version", std::string("symbiosim ") + kArtifactVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_flag;
  std::uint64_t seed_flag = 0;
  int replications_flag = 0;

  app.add_option("--config", config_path, "configuration file (key = value lines)");
  app.add_option("--set", sets, "override a configuration key (key=value, repeatable)");
  auto* out_opt = app.add_option("--out", out_flag, "output directory");
  auto* seed_opt = app.add_option("--seed", seed_flag, "base seed");
  auto* reps_opt =
      app.add_option("--replications", replications_flag, "Monte Carlo replications");

  auto* simulate = app.add_subcommand(
      "simulate", "one design x algorithm pair; per-replication and summary CSVs");
  auto* sweep = app.add_subcommand(
      "sweep", "grid over designs x pairs x gamma_pref x p; bias tables");
  auto* theory = app.add_subcommand(
      "theory", "closed-form biases, gap and cut quality from graph files");
  auto* verify = app.add_subcommand(
      "verify", "brute-force vs closed-form agreement on random instances");
  auto* counterfactual =
      app.add_subcommand("counterfactual", "ground-truth take-up table per algorithm");
  for (auto* sub : {simulate, sweep, theory, verify, counterfactual}) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> overrides;
    // Environment override applies only when no --out flag was given;
    // explicit --set/--out assignments still win by arriving later.
    if (out_opt->count() == 0) {
      if (const char* env_out = std::getenv("SYMBIOSIM_OUT")) {
        overrides.push_back(std::string("out=") + env_out);
      }
    }
    overrides.insert(overrides.end(), sets.begin(), sets.end());
    if (seed_opt->count() > 0) overrides.push_back("seed=" + std::to_string(seed_flag));
    if (reps_opt->count() > 0) {
      overrides.push_back("replications=" + std::to_string(replications_flag));
    }
    if (out_opt->count() > 0) overrides.push_back("out=" + out_flag);

    const RunConfig cfg =
        parse_config(config_path.empty() ? nullptr : &config_path, overrides);
    std::filesystem::create_directories(cfg.out_dir);

    if (simulate->parsed()) return cmd_simulate(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (theory->parsed()) return cmd_theory(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (counterfactual->parsed()) return cmd_counterfactual(cfg);
    std::cerr << "error: no subcommand\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
