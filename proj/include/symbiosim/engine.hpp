#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "symbiosim/designs.hpp"
#include "symbiosim/interaction_log.hpp"
#include "symbiosim/kinds.hpp"
#include "symbiosim/params.hpp"
#include "symbiosim/population.hpp"
#include "symbiosim/recommenders.hpp"
#include "symbiosim/rng.hpp"

namespace symbiosim {

inline constexpr double kCiZ = 1.96;  // normal 95% interval

// Per-run soundness counters; any nonzero value is a bug and makes
// run_experiment throw.
struct RunAudit {
  // Co-diversion: post-randomization records whose user and item arms differ.
  std::int64_t cross_arm_records = 0;
  // Diverted training matrices containing other-arm post-randomization
  // entries (re-derived from the raw log, not from the scope filter).
  std::int64_t matrix_scope_violations = 0;

  std::int64_t total() const { return cross_arm_records + matrix_scope_violations; }
  RunAudit& operator+=(const RunAudit& o);
};

struct RunResult {
  std::vector<double> take_up;  // per user
  double tte_hat = 0.0;
  double arm_mean_treatment = 0.0;
  double arm_mean_control = 0.0;
  SimParams params;  // config echo
  std::uint64_t population_seed = 0;
  RunAudit audit;
};

// The user's choice from a ranked slate: perceived utility of every item at
// its rank, argmax (ties to the better rank), consumed only if it clears
// the user's reserve. `ranked` must exclude already-consumed items.
std::optional<std::int32_t> consume_step(int user, const std::vector<std::int32_t>& ranked,
                                         const PopulationModel& population,
                                         double rank_decay);

// Runs the full period loop: staggered release, warm-up random ranking,
// per-arm retraining every f periods after randomization, visibility
// filtering, interleaving of unknown items, consumption, logging.
RunResult run_experiment(const SimParams& params, const ExperimentPlan& plan,
                         const PopulationModel& population, Rng& runtime_rng);

// Fraction of periods with a consumption, per user.
std::vector<double> take_up_rates(const InteractionLog& log, int periods);
// Same, restricted to post-randomization periods when post_only is set.
std::vector<double> take_up_rates_window(const InteractionLog& log, int periods,
                                         int t_init, bool post_only);

// Difference of arm means. Throws if either arm is empty.
double estimate_tte(const std::vector<double>& outcomes, const std::vector<Arm>& arms);

struct TruthEstimate {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  int replications = 0;

  bool valid() const { return replications > 0; }
};

// Ground-truth take-up of an algorithm: naive experiments with the same
// algorithm in both arms, pooled over all users; SE over replications.
// Replication r uses population seed base_seed ^ r.
TruthEstimate true_counterfactual(const SimParams& params, RecommenderKind algo,
                                  int replications, std::uint64_t base_seed,
                                  int threads = 1);

struct BiasReport {
  DesignKind design = DesignKind::naive;
  RecommenderKind algo_treatment = RecommenderKind::random;
  RecommenderKind algo_control = RecommenderKind::random;
  double split_prob = 0.5;
  double gamma_pref = 1.0;
  int replications = 0;
  std::uint64_t base_seed = 0;

  // Per-replication outcomes, indexed by replication.
  std::vector<double> tte_hats;
  std::vector<double> take_up_treatment;
  std::vector<double> take_up_control;

  double tte_mean = 0.0, tte_se = 0.0, tte_ci_low = 0.0, tte_ci_high = 0.0;
  double take_up_treatment_mean = 0.0, take_up_treatment_se = 0.0;
  double take_up_control_mean = 0.0, take_up_control_se = 0.0;

  TruthEstimate truth_treatment, truth_control;
  double bias_treatment = std::numeric_limits<double>::quiet_NaN();
  double bias_control = std::numeric_limits<double>::quiet_NaN();
  double bias_tte = std::numeric_limits<double>::quiet_NaN();

  RunAudit audit_total;
};

struct McOptions {
  int replications = 200;
  // 0 means "same as replications". Truth runs draw from an independent
  // seed stream (mix(base, kTruthSalt)) so truth errors are uncorrelated
  // with the comparison runs.
  int truth_replications = 0;
  int threads = 1;
  bool compute_truths = true;
  // Already-computed truths to reuse (e.g. shared across designs).
  const TruthEstimate* truth_treatment = nullptr;
  const TruthEstimate* truth_control = nullptr;
};

// Monte Carlo replication harness. Replication r reuses population seed
// base ^ r, so the same replication index sees the same population across
// designs and algorithm pairs (paired comparisons by common random
// numbers). Aggregation is by replication index, independent of completion
// order.
BiasReport monte_carlo(const SimParams& params, DesignKind design,
                       RecommenderKind algo_treatment, RecommenderKind algo_control,
                       const McOptions& options);

// Statistical helpers shared by the reports.
double mean_of(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);  // NaN when n < 2
double standard_error(const std::vector<double>& xs);

}  // namespace symbiosim
