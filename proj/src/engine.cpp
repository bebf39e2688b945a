#include "symbiosim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace symbiosim {

RunAudit& RunAudit::operator+=(const RunAudit& o) {
  cross_arm_records += o.cross_arm_records;
  matrix_scope_violations += o.matrix_scope_violations;
  return *this;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? std::numeric_limits<double>::quiet_NaN() : s / xs.size();
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (xs.size() - 1));
}

double standard_error(const std::vector<double>& xs) {
  return sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

std::optional<std::int32_t> consume_step(int user, const std::vector<std::int32_t>& ranked,
                                         const PopulationModel& population,
                                         double rank_decay) {
  double best = -1.0;
  std::int32_t best_item = -1;
  for (std::size_t idx = 0; idx < ranked.size(); ++idx) {
    const double pu =
        perceived_utility(population.utility(user, ranked[idx]),
                          static_cast<int>(idx) + 1, rank_decay);
    if (pu > best) {
      best = pu;
      best_item = ranked[idx];
    }
  }
  if (best_item >= 0 && best > population.reserve(user)) return best_item;
  return std::nullopt;
}

namespace {

// Max-heap ordering: highest score first, ties to the lowest item id.
bool heap_less(const ItemScore& a, const ItemScore& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.item > b.item;
}

// Fused ranking + choice. Bit-equivalent to
//   consume_step(user, rank_with_interleave(scores, rng), ...)
// including RNG consumption (the interleave plan helper is shared), but
// stops scanning once no later rank can strictly beat the incumbent:
// perceived utility at rank r is at most decay[r] because utilities are
// capped at 1.
std::optional<std::int32_t> choose_from_scores(std::vector<ItemScore>& scores,
                                               const double* utility_row,
                                               const std::vector<double>& decay,
                                               double reserve, Rng& rng,
                                               InterleavePlan& plan) {
  // Stable in-place partition: knowns compact to the front (original order),
  // unknown item ids collect in candidate order.
  const int n = static_cast<int>(scores.size());
  plan.unknown_order.clear();
  std::size_t n_known = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k].known) {
      scores[n_known++] = scores[k];
    } else {
      plan.unknown_order.push_back(scores[k].item);
    }
  }
  make_interleave_plan_into(static_cast<int>(n_known), rng, plan);
  const auto known_begin = scores.begin();
  auto known_end = scores.begin() + static_cast<std::ptrdiff_t>(n_known);
  std::make_heap(known_begin, known_end, heap_less);

  double best = -1.0;
  std::int32_t best_item = -1;
  std::size_t next_unknown = 0;
  for (int r = 1; r <= n; ++r) {
    std::int32_t item;
    if (plan.slot_is_unknown[r - 1]) {
      item = plan.unknown_order[next_unknown++];
    } else {
      std::pop_heap(known_begin, known_end, heap_less);
      item = (--known_end)->item;
    }
    const double pu = utility_row[item] * decay[r];
    if (pu > best) {
      best = pu;
      best_item = item;
    }
    if (r < n && best >= decay[r + 1]) break;
  }
  if (best_item >= 0 && best > reserve) return best_item;
  return std::nullopt;
}

// Independent re-derivation of a diverted matrix's scope from the raw log.
std::int64_t audit_matrix(const TrainingMatrix& matrix, const InteractionLog& log,
                          const ExperimentPlan& plan) {
  if (matrix.design != DesignKind::data_diverted && matrix.design != DesignKind::co_diverted) {
    return 0;
  }
  std::int64_t violations = 0;
  for (int u = 0; u < matrix.n_users; ++u) {
    for (std::int32_t i : matrix.items_of_user[u]) {
      const std::int32_t period = log.period_of(u, i);
      if (period == 0 || period >= matrix.as_of) {
        ++violations;  // entry not backed by an eligible record
        continue;
      }
      if (period > plan.randomized_at &&
          log.arm_of(u, i) != static_cast<std::int8_t>(matrix.scope_arm)) {
        ++violations;
      }
    }
  }
  return violations;
}

const TrainingMatrix& empty_matrix() {
  static const TrainingMatrix m;
  return m;
}

}  // namespace

RunResult run_experiment(const SimParams& params, const ExperimentPlan& plan,
                         const PopulationModel& population, Rng& runtime_rng) {
  params.validate();
  if (population.n_users() != params.n_users || population.n_items() != params.n_items) {
    throw std::invalid_argument("population does not match the parameters");
  }
  if (static_cast<int>(plan.user_arm.size()) != params.n_users) {
    throw std::invalid_argument("plan does not cover every user");
  }
  if (plan.design == DesignKind::co_diverted &&
      static_cast<int>(plan.item_arm.size()) != params.n_items) {
    throw std::invalid_argument("co-diverted plan does not cover every item");
  }
  if (plan.randomized_at != params.t_init) {
    throw std::invalid_argument("plan randomization period does not match t_init");
  }

  InteractionLog log(params.n_users, params.n_items, params.periods);

  std::vector<double> decay(params.n_items + 1, 1.0);
  for (int r = 1; r <= params.n_items; ++r) {
    decay[r] = std::pow(static_cast<double>(r), -params.rank_decay);
  }

  std::vector<std::int32_t> released;
  released.reserve(params.n_items);
  TrainingMatrix matrices[2];
  bool have_matrices = false;
  CfScratch cf_scratch;
  std::vector<ItemScore> scores;
  InterleavePlan plan_scratch;
  std::vector<std::int32_t> candidates;
  candidates.reserve(params.n_items);
  RunAudit audit;

  for (int t = 1; t <= params.periods; ++t) {
    const auto& block = population.released_at(t);
    released.insert(released.end(), block.begin(), block.end());
    std::inplace_merge(released.begin(), released.end() - block.size(), released.end());

    // First post-randomization period always builds the matrices; after
    // that the schedule is anchored at the randomization period.
    if (t > params.t_init &&
        (!have_matrices || (t - params.t_init) % params.retrain_every == 0)) {
      matrices[0] = build_training_matrix(log, plan, Arm::control, t);
      matrices[1] = build_training_matrix(log, plan, Arm::treatment, t);
      audit.matrix_scope_violations += audit_matrix(matrices[0], log, plan);
      audit.matrix_scope_violations += audit_matrix(matrices[1], log, plan);
      have_matrices = true;
    }

    const bool codiv_active =
        plan.design == DesignKind::co_diverted && t > plan.randomized_at;
    for (int u = 0; u < params.n_users; ++u) {
      const std::int32_t* consumed_row = log.period_row(u);
      const Arm user_arm = plan.user_arm[u];
      candidates.clear();
      for (std::int32_t i : released) {
        if (consumed_row[i] == 0 && (!codiv_active || plan.item_arm[i] == user_arm)) {
          candidates.push_back(i);
        }
      }
      if (candidates.empty()) continue;

      const bool warmup = t <= params.t_init;
      const Arm arm = plan.user_arm[u];
      const RecommenderKind kind =
          warmup ? RecommenderKind::random : plan.algo_for(arm);
      const TrainingMatrix& matrix =
          warmup ? empty_matrix() : matrices[arm == Arm::treatment ? 1 : 0];
      score_items_into(kind, matrix, population, u, candidates, runtime_rng, cf_scratch,
                       scores);
      const std::optional<std::int32_t> chosen =
          choose_from_scores(scores, population.utility_row(u), decay,
                             population.reserve(u), runtime_rng, plan_scratch);
      if (chosen) {
        log.append({u, *chosen, t,
                    warmup ? kArmNone : static_cast<std::int8_t>(arm)});
      }
    }
  }

  if (plan.design == DesignKind::co_diverted) {
    for (const InteractionRecord& rec : log.records()) {
      if (rec.period > plan.randomized_at &&
          static_cast<std::int8_t>(plan.item_arm[rec.item]) != rec.arm) {
        ++audit.cross_arm_records;
      }
    }
  }
  if (audit.total() != 0) {
    throw std::logic_error("data-scope audit failed: " +
                           std::to_string(audit.cross_arm_records) + " cross-arm records, " +
                           std::to_string(audit.matrix_scope_violations) +
                           " training-matrix scope violations");
  }

  RunResult result;
  result.take_up = take_up_rates_window(log, params.periods, params.t_init,
                                        params.take_up_post_randomization_only);
  result.tte_hat = estimate_tte(result.take_up, plan.user_arm);
  double sum_t = 0.0, sum_c = 0.0;
  int n_t = 0, n_c = 0;
  for (int u = 0; u < params.n_users; ++u) {
    if (plan.user_arm[u] == Arm::treatment) {
      sum_t += result.take_up[u];
      ++n_t;
    } else {
      sum_c += result.take_up[u];
      ++n_c;
    }
  }
  result.arm_mean_treatment = sum_t / n_t;
  result.arm_mean_control = sum_c / n_c;
  result.params = params;
  result.population_seed = population.seed();
  result.audit = audit;
  return result;
}

std::vector<double> take_up_rates(const InteractionLog& log, int periods) {
  return take_up_rates_window(log, periods, 0, false);
}

std::vector<double> take_up_rates_window(const InteractionLog& log, int periods,
                                         int t_init, bool post_only) {
  const int window = post_only ? periods - t_init : periods;
  if (window <= 0) throw std::invalid_argument("empty take-up window");
  std::vector<double> rates(log.n_users(), 0.0);
  for (const InteractionRecord& rec : log.records()) {
    if (post_only && rec.period <= t_init) continue;
    rates[rec.user] += 1.0;
  }
  for (double& r : rates) r /= window;
  return rates;
}

double estimate_tte(const std::vector<double>& outcomes, const std::vector<Arm>& arms) {
  if (outcomes.size() != arms.size()) {
    throw std::invalid_argument("outcomes and arms must align");
  }
  double sum_t = 0.0, sum_c = 0.0;
  std::size_t n_t = 0, n_c = 0;
  for (std::size_t u = 0; u < outcomes.size(); ++u) {
    if (arms[u] == Arm::treatment) {
      sum_t += outcomes[u];
      ++n_t;
    } else {
      sum_c += outcomes[u];
      ++n_c;
    }
  }
  if (n_t == 0 || n_c == 0) throw std::invalid_argument("both arms must be nonempty");
  return sum_t / n_t - sum_c / n_c;
}

namespace {

// Runs fn(r) for r in [0, n); worker threads pull from a shared counter.
// Results must be written to per-index slots by the callable.
template <typename Fn>
void parallel_replications(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int r = 0; r < n; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= n) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

RunResult run_one_replication(const SimParams& params, DesignKind design,
                              RecommenderKind algo_t, RecommenderKind algo_c,
                              std::uint64_t base_seed, int replication) {
  const std::uint64_t pop_seed = base_seed ^ static_cast<std::uint64_t>(replication);
  const PopulationModel population = PopulationModel::build(params, pop_seed);
  Rng assignment_rng(derive_stream_seed(pop_seed, kAssignmentSalt));
  const ExperimentPlan plan =
      make_assignment(design, population, params, algo_t, algo_c, assignment_rng);
  Rng runtime_rng(derive_stream_seed(pop_seed, kRuntimeSalt));
  return run_experiment(params, plan, population, runtime_rng);
}

}  // namespace

TruthEstimate true_counterfactual(const SimParams& params, RecommenderKind algo,
                                  int replications, std::uint64_t base_seed, int threads) {
  if (replications < 1) throw std::invalid_argument("need at least one replication");
  std::vector<double> pooled(replications);
  parallel_replications(replications, threads, [&](int r) {
    const RunResult run =
        run_one_replication(params, DesignKind::naive, algo, algo, base_seed, r);
    pooled[r] = mean_of(run.take_up);
  });
  TruthEstimate truth;
  truth.mean = mean_of(pooled);
  truth.se = standard_error(pooled);
  truth.replications = replications;
  return truth;
}

BiasReport monte_carlo(const SimParams& params, DesignKind design,
                       RecommenderKind algo_treatment, RecommenderKind algo_control,
                       const McOptions& options) {
  if (options.replications < 2) throw std::invalid_argument("need at least two replications");
  BiasReport report;
  report.design = design;
  report.algo_treatment = algo_treatment;
  report.algo_control = algo_control;
  report.split_prob = params.split_prob;
  report.gamma_pref = params.gamma_pref;
  report.replications = options.replications;
  report.base_seed = params.seed;
  report.tte_hats.resize(options.replications);
  report.take_up_treatment.resize(options.replications);
  report.take_up_control.resize(options.replications);

  std::vector<RunAudit> audits(options.replications);
  parallel_replications(options.replications, options.threads, [&](int r) {
    const RunResult run = run_one_replication(params, design, algo_treatment,
                                              algo_control, params.seed, r);
    report.tte_hats[r] = run.tte_hat;
    report.take_up_treatment[r] = run.arm_mean_treatment;
    report.take_up_control[r] = run.arm_mean_control;
    audits[r] = run.audit;
  });
  for (const RunAudit& a : audits) report.audit_total += a;

  report.tte_mean = mean_of(report.tte_hats);
  report.tte_se = standard_error(report.tte_hats);
  report.tte_ci_low = report.tte_mean - kCiZ * report.tte_se;
  report.tte_ci_high = report.tte_mean + kCiZ * report.tte_se;
  report.take_up_treatment_mean = mean_of(report.take_up_treatment);
  report.take_up_treatment_se = standard_error(report.take_up_treatment);
  report.take_up_control_mean = mean_of(report.take_up_control);
  report.take_up_control_se = standard_error(report.take_up_control);

  if (options.truth_treatment) {
    report.truth_treatment = *options.truth_treatment;
  }
  if (options.truth_control) {
    report.truth_control = *options.truth_control;
  }
  if (options.compute_truths) {
    const int truth_reps =
        options.truth_replications > 0 ? options.truth_replications : options.replications;
    const std::uint64_t truth_base = derive_stream_seed(params.seed, kTruthSalt);
    if (!report.truth_treatment.valid()) {
      report.truth_treatment =
          true_counterfactual(params, algo_treatment, truth_reps, truth_base, options.threads);
    }
    if (!report.truth_control.valid()) {
      report.truth_control =
          true_counterfactual(params, algo_control, truth_reps, truth_base, options.threads);
    }
  }
  if (report.truth_treatment.valid() && report.truth_control.valid()) {
    report.bias_treatment = report.take_up_treatment_mean - report.truth_treatment.mean;
    report.bias_control = report.take_up_control_mean - report.truth_control.mean;
    report.bias_tte =
        report.tte_mean - (report.truth_treatment.mean - report.truth_control.mean);
  }
  return report;
}

}  // namespace symbiosim
