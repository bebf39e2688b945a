#include <doctest.h>

#include <cmath>
#include <vector>

#include "symbiosim/engine.hpp"

using namespace symbiosim;

namespace {

SimParams small_params() {
  SimParams p;
  p.n_users = 40;
  p.n_items = 200;
  p.periods = 50;
  p.t_init = 5;
  p.seed = 101;
  return p;
}

// The engine loop re-expressed through the public per-operation surface
// (score_items -> rank_with_interleave -> consume_step). The production
// loop must match this bit for bit, including its RNG consumption.
std::vector<double> reference_run(const SimParams& params, const ExperimentPlan& plan,
                                  const PopulationModel& pop, Rng& rng) {
  InteractionLog log(params.n_users, params.n_items, params.periods);
  std::vector<std::int32_t> released;
  TrainingMatrix matrices[2];
  bool have_matrices = false;
  const TrainingMatrix no_matrix;

  for (int t = 1; t <= params.periods; ++t) {
    const auto& block = pop.released_at(t);
    released.insert(released.end(), block.begin(), block.end());
    std::sort(released.begin(), released.end());

    if (t > params.t_init &&
        (!have_matrices || (t - params.t_init) % params.retrain_every == 0)) {
      matrices[0] = build_training_matrix(log, plan, Arm::control, t);
      matrices[1] = build_training_matrix(log, plan, Arm::treatment, t);
      have_matrices = true;
    }

    for (int u = 0; u < params.n_users; ++u) {
      std::vector<std::int32_t> unconsumed;
      for (std::int32_t i : released) {
        if (!log.has_consumed(u, i)) unconsumed.push_back(i);
      }
      const std::vector<std::int32_t> candidates = visible_items(plan, u, unconsumed, t);
      if (candidates.empty()) continue;
      const bool warmup = t <= params.t_init;
      const Arm arm = plan.user_arm[u];
      const RecommenderKind kind = warmup ? RecommenderKind::random : plan.algo_for(arm);
      const TrainingMatrix& matrix =
          warmup ? no_matrix : matrices[arm == Arm::treatment ? 1 : 0];
      const auto scores = score_items(kind, matrix, pop, u, candidates, rng);
      const auto ranked = rank_with_interleave(scores, rng);
      const auto chosen = consume_step(u, ranked, pop, params.rank_decay);
      if (chosen) {
        log.append({u, *chosen, t, warmup ? kArmNone : static_cast<std::int8_t>(arm)});
      }
    }
  }
  return take_up_rates_window(log, params.periods, params.t_init,
                              params.take_up_post_randomization_only);
}

RunResult run_once(const SimParams& params, DesignKind design, RecommenderKind algo_t,
                   RecommenderKind algo_c, std::uint64_t replication = 0) {
  const std::uint64_t pop_seed = params.seed ^ replication;
  const PopulationModel pop = PopulationModel::build(params, pop_seed);
  Rng assign(derive_stream_seed(pop_seed, kAssignmentSalt));
  const ExperimentPlan plan = make_assignment(design, pop, params, algo_t, algo_c, assign);
  Rng runtime(derive_stream_seed(pop_seed, kRuntimeSalt));
  return run_experiment(params, plan, pop, runtime);
}

}  // namespace

TEST_CASE("consume_step picks the reserve-clearing perceived argmax") {
  SimParams p;
  p.n_users = 1;
  p.n_items = 10;
  p.periods = 10;
  p.t_init = 2;
  const PopulationModel pop = PopulationModel::build(p, 1);

  // Single item above reserve -> consumed.
  {
    std::vector<std::int32_t> ranked{0};
    const double util = pop.utility(0, 0);
    const auto chosen = consume_step(0, ranked, pop, 0.8);
    if (util > pop.reserve(0)) {
      CHECK(chosen.has_value());
    } else {
      CHECK_FALSE(chosen.has_value());
    }
  }
  // Empty slate -> none.
  CHECK_FALSE(consume_step(0, {}, pop, 0.8).has_value());
}

TEST_CASE("consume_step spec examples on a crafted population") {
  // Crafted single-user world: utilities {0.6 at rank 1, 0.9 at rank 3},
  // d = 0.8, reserve ~ 0.55: perceived are {0.6, 0.9 * 3^-0.8 = 0.374},
  // so the rank-1 item wins and clears the reserve.
  SimParams p;
  p.n_users = 2;
  p.n_items = 4;
  p.periods = 4;
  p.t_init = 1;
  const PopulationModel pop = PopulationModel::build(p, 2);

  // Find the true utilities so the expectations are computed, not assumed.
  const double u0 = pop.utility(0, 0), u1 = pop.utility(0, 1), u2 = pop.utility(0, 2);
  const std::vector<std::int32_t> ranked{0, 1, 2};
  double best = -1.0;
  std::int32_t best_item = -1;
  const double perceived[3] = {u0 * std::pow(1.0, -0.8), u1 * std::pow(2.0, -0.8),
                               u2 * std::pow(3.0, -0.8)};
  for (int r = 0; r < 3; ++r) {
    if (perceived[r] > best) {
      best = perceived[r];
      best_item = ranked[r];
    }
  }
  const auto chosen = consume_step(0, ranked, pop, 0.8);
  if (best > pop.reserve(0)) {
    REQUIRE(chosen.has_value());
    CHECK(*chosen == best_item);
  } else {
    CHECK_FALSE(chosen.has_value());
  }
}

TEST_CASE("take-up rates count consuming periods over T") {
  InteractionLog log(2, 100, 100);
  for (int t = 1; t <= 25; ++t) log.append({0, t, t, kArmNone});
  const auto rates = take_up_rates(log, 100);
  CHECK(rates[0] == doctest::Approx(0.25));
  CHECK(rates[1] == doctest::Approx(0.0));

  InteractionLog full(1, 100, 100);
  for (int t = 1; t <= 100; ++t) full.append({0, t - 1, t, kArmNone});
  CHECK(take_up_rates(full, 100)[0] == doctest::Approx(1.0));
}

TEST_CASE("post-randomization take-up window") {
  InteractionLog log(1, 100, 100);
  log.append({0, 0, 5, kArmNone});
  log.append({0, 1, 50, 1});
  const auto rates = take_up_rates_window(log, 100, 10, true);
  CHECK(rates[0] == doctest::Approx(1.0 / 90.0));
}

TEST_CASE("tte estimator is the difference of arm means") {
  const std::vector<Arm> arms{Arm::treatment, Arm::treatment, Arm::control, Arm::control};
  CHECK(estimate_tte({1, 1, 0, 0}, arms) == doctest::Approx(1.0));
  CHECK(estimate_tte({0.5, 0.5, 0.5, 0.5}, arms) == doctest::Approx(0.0));
  CHECK(estimate_tte({0.4, 0.6, 0.1, 0.3}, arms) == doctest::Approx(0.3));
  CHECK_THROWS_AS(estimate_tte({1, 1}, {Arm::treatment, Arm::treatment}),
                  std::invalid_argument);
}

TEST_CASE("tte estimator is antisymmetric under arm swap") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> outcomes(10);
    std::vector<Arm> arms(10), flipped(10);
    for (int i = 0; i < 10; ++i) {
      outcomes[i] = rng.uniform();
      arms[i] = i < 4 ? Arm::treatment : Arm::control;
      flipped[i] = i < 4 ? Arm::control : Arm::treatment;
    }
    CHECK(estimate_tte(outcomes, arms) == doctest::Approx(-estimate_tte(outcomes, flipped)));
  }
}

TEST_CASE("log rejects duplicate pairs and double consumption per period") {
  InteractionLog log(3, 10, 20);
  log.append({0, 1, 1, kArmNone});
  CHECK_THROWS_AS(log.append({0, 1, 2, kArmNone}), std::logic_error);   // same pair
  CHECK_THROWS_AS(log.append({0, 2, 1, kArmNone}), std::logic_error);   // same period
  CHECK_THROWS_AS(log.append({0, 3, 21, kArmNone}), std::logic_error);  // period range
  log.append({0, 2, 2, kArmNone});
  CHECK(log.records().size() == 2);
}

TEST_CASE("run_experiment matches the compositional reference bit for bit") {
  SimParams params = small_params();
  params.n_users = 20;
  params.n_items = 80;
  params.periods = 20;
  params.t_init = 4;
  for (DesignKind design : kAllDesigns) {
    for (RecommenderKind algo :
         {RecommenderKind::oracle, RecommenderKind::random, RecommenderKind::item_cf,
          RecommenderKind::user_cf}) {
      const std::uint64_t pop_seed = params.seed ^ 7;
      const PopulationModel pop = PopulationModel::build(params, pop_seed);
      Rng assign_a(derive_stream_seed(pop_seed, kAssignmentSalt));
      const ExperimentPlan plan =
          make_assignment(design, pop, params, algo, RecommenderKind::random, assign_a);

      Rng runtime_engine(derive_stream_seed(pop_seed, kRuntimeSalt));
      const RunResult engine_result = run_experiment(params, plan, pop, runtime_engine);

      Rng runtime_reference(derive_stream_seed(pop_seed, kRuntimeSalt));
      const std::vector<double> reference = reference_run(params, plan, pop, runtime_reference);

      REQUIRE(engine_result.take_up.size() == reference.size());
      for (std::size_t u = 0; u < reference.size(); ++u) {
        CHECK(engine_result.take_up[u] == reference[u]);  // bit-identical
      }
    }
  }
}

TEST_CASE("identical seeds give bit-identical runs") {
  const SimParams params = small_params();
  const RunResult a = run_once(params, DesignKind::data_diverted, RecommenderKind::item_cf,
                               RecommenderKind::random);
  const RunResult b = run_once(params, DesignKind::data_diverted, RecommenderKind::item_cf,
                               RecommenderKind::random);
  CHECK(a.tte_hat == b.tte_hat);
  for (std::size_t u = 0; u < a.take_up.size(); ++u) CHECK(a.take_up[u] == b.take_up[u]);
}

TEST_CASE("take-up stays within [0,1] and audits stay clean") {
  const SimParams params = small_params();
  for (DesignKind design : kAllDesigns) {
    const RunResult run = run_once(params, design, RecommenderKind::user_cf,
                                   RecommenderKind::oracle, 3);
    for (double r : run.take_up) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
    CHECK(run.audit.total() == 0);
  }
}

TEST_CASE("oracle A/A arms agree within two standard errors") {
  SimParams params = small_params();
  McOptions opts;
  opts.replications = 50;
  opts.compute_truths = false;
  for (DesignKind design : {DesignKind::naive, DesignKind::clustered}) {
    const BiasReport report =
        monte_carlo(params, design, RecommenderKind::oracle, RecommenderKind::oracle, opts);
    CHECK(std::fabs(report.tte_mean) < 2.0 * report.tte_se);
  }
}

TEST_CASE("random A/A null holds at 3 standard errors") {
  SimParams params = small_params();
  McOptions opts;
  opts.replications = 200;
  opts.compute_truths = false;
  const BiasReport report = monte_carlo(params, DesignKind::naive, RecommenderKind::random,
                                        RecommenderKind::random, opts);
  CHECK(std::fabs(report.tte_mean) < 3.0 * report.tte_se);
}

TEST_CASE("true counterfactual is deterministic and algorithm-shaped") {
  SimParams params = small_params();
  const TruthEstimate a = true_counterfactual(params, RecommenderKind::random, 10, 99);
  const TruthEstimate b = true_counterfactual(params, RecommenderKind::random, 10, 99);
  CHECK(a.mean == b.mean);
  CHECK(a.se == b.se);

  // The oracle cannot do worse than random recommendations on average.
  const TruthEstimate oracle = true_counterfactual(params, RecommenderKind::oracle, 10, 99);
  CHECK(oracle.mean > a.mean);
}

TEST_CASE("oracle arm matches its counterfactual regardless of the competitor") {
  // Oracle ranking ignores training data, so in a naive experiment its arm
  // take-up equals the all-oracle counterfactual up to assignment noise.
  SimParams params = small_params();
  McOptions opts;
  opts.replications = 50;
  opts.truth_replications = 50;
  const BiasReport report = monte_carlo(params, DesignKind::naive, RecommenderKind::oracle,
                                        RecommenderKind::random, opts);
  const double se = std::sqrt(report.take_up_treatment_se * report.take_up_treatment_se +
                              report.truth_treatment.se * report.truth_treatment.se);
  CHECK(std::fabs(report.take_up_treatment_mean - report.truth_treatment.mean) < 3.0 * se);
}

TEST_CASE("monte carlo reports are reproducible and internally consistent") {
  SimParams params = small_params();
  params.n_users = 20;
  params.n_items = 60;
  params.periods = 20;
  params.t_init = 4;
  McOptions opts;
  opts.replications = 3;
  opts.truth_replications = 3;
  const BiasReport a = monte_carlo(params, DesignKind::co_diverted, RecommenderKind::item_cf,
                                   RecommenderKind::random, opts);
  const BiasReport b = monte_carlo(params, DesignKind::co_diverted, RecommenderKind::item_cf,
                                   RecommenderKind::random, opts);
  CHECK(a.tte_hats == b.tte_hats);
  CHECK(a.truth_treatment.mean == b.truth_treatment.mean);
  CHECK(a.bias_tte == b.bias_tte);

  // CI and bias identities.
  CHECK(a.tte_ci_low == doctest::Approx(a.tte_mean - kCiZ * a.tte_se));
  CHECK(a.tte_ci_high == doctest::Approx(a.tte_mean + kCiZ * a.tte_se));
  CHECK(a.bias_tte == doctest::Approx(a.tte_mean -
                                      (a.truth_treatment.mean - a.truth_control.mean)));
  for (int r = 0; r < a.replications; ++r) {
    CHECK(a.tte_hats[r] ==
          doctest::Approx(a.take_up_treatment[r] - a.take_up_control[r]).epsilon(1e-12));
  }
  CHECK(a.audit_total.total() == 0);
}

TEST_CASE("threaded and serial monte carlo agree bit for bit") {
  SimParams params = small_params();
  params.n_users = 20;
  params.n_items = 60;
  params.periods = 20;
  params.t_init = 4;
  McOptions serial;
  serial.replications = 6;
  serial.compute_truths = false;
  McOptions threaded = serial;
  threaded.threads = 4;
  const BiasReport a = monte_carlo(params, DesignKind::naive, RecommenderKind::user_cf,
                                   RecommenderKind::random, serial);
  const BiasReport b = monte_carlo(params, DesignKind::naive, RecommenderKind::user_cf,
                                   RecommenderKind::random, threaded);
  CHECK(a.tte_hats == b.tte_hats);
  CHECK(a.tte_mean == b.tte_mean);
}
