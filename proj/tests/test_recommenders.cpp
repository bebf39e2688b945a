#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "symbiosim/recommenders.hpp"

using namespace symbiosim;

namespace {

SimParams micro_params() {
  SimParams p;
  p.n_users = 2;
  p.n_items = 4;
  p.periods = 4;
  p.t_init = 1;
  return p;
}

// Hand-built incidence matrix R = [[1,1,0],[1,0,1]] over 2 users x 3 items
// (a 4th item stays cold). Consumptions happen pre-randomization so every
// scope includes them.
TrainingMatrix hand_matrix() {
  TrainingMatrix m;
  m.n_users = 2;
  m.n_items = 4;
  m.as_of = 4;
  m.design = DesignKind::naive;
  m.scope_arm = Arm::treatment;
  m.items_of_user = {{0, 1}, {0, 2}};
  m.users_of_item = {{0, 1}, {0}, {1}, {}};
  m.finalize_degrees();
  return m;
}

PopulationModel micro_population() {
  return PopulationModel::build(micro_params(), 9);
}

}  // namespace

TEST_CASE("training matrix: naive includes the full log") {
  const SimParams p = micro_params();
  InteractionLog log(p.n_users, p.n_items, p.periods);
  log.append({0, 0, 1, kArmNone});
  log.append({1, 2, 1, kArmNone});
  log.append({0, 1, 2, static_cast<std::int8_t>(Arm::control)});

  ExperimentPlan plan;
  plan.design = DesignKind::naive;
  plan.user_arm = {Arm::treatment, Arm::control};
  plan.randomized_at = p.t_init;

  const TrainingMatrix m = build_training_matrix(log, plan, Arm::treatment, 4);
  CHECK(m.items_of_user[0] == std::vector<std::int32_t>{0, 1});
  CHECK(m.items_of_user[1] == std::vector<std::int32_t>{2});
  CHECK(m.entry_count() == 3);

  // as_of excludes records at or after the cutoff.
  const TrainingMatrix earlier = build_training_matrix(log, plan, Arm::treatment, 2);
  CHECK(earlier.entry_count() == 2);
}

TEST_CASE("training matrix: data diversion drops other-arm records") {
  const SimParams p = micro_params();
  InteractionLog log(p.n_users, p.n_items, p.periods);
  log.append({0, 0, 1, kArmNone});  // pre-randomization, shared
  log.append({1, 2, 2, static_cast<std::int8_t>(Arm::control)});

  ExperimentPlan plan;
  plan.design = DesignKind::data_diverted;
  plan.user_arm = {Arm::treatment, Arm::control};
  plan.randomized_at = p.t_init;

  const TrainingMatrix treatment = build_training_matrix(log, plan, Arm::treatment, 4);
  CHECK(treatment.items_of_user[0] == std::vector<std::int32_t>{0});
  CHECK(treatment.items_of_user[1].empty());

  const TrainingMatrix control = build_training_matrix(log, plan, Arm::control, 4);
  CHECK(control.items_of_user[0] == std::vector<std::int32_t>{0});
  CHECK(control.items_of_user[1] == std::vector<std::int32_t>{2});
}

TEST_CASE("itemcf scores by summed column cosines") {
  const TrainingMatrix m = hand_matrix();
  const PopulationModel pop = micro_population();
  Rng rng(1);
  // User 0 consumed items {0, 1}; candidate item 2:
  // cos(c2, c0) + cos(c2, c1) = 1/sqrt(2) + 0.
  const auto scores = score_items(RecommenderKind::item_cf, m, pop, 0, {2, 3}, rng);
  REQUIRE(scores.size() == 2);
  CHECK(scores[0].known);
  CHECK(scores[0].score == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK_FALSE(scores[1].known);  // cold column
}

TEST_CASE("usercf scores by similarity-weighted consumption") {
  const TrainingMatrix m = hand_matrix();
  const PopulationModel pop = micro_population();
  Rng rng(1);
  // cos(r0, r1) * R[1, 2] = 0.5 * 1.
  const auto scores = score_items(RecommenderKind::user_cf, m, pop, 0, {2, 3}, rng);
  REQUIRE(scores.size() == 2);
  CHECK(scores[0].known);
  CHECK(scores[0].score == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(scores[1].known);
}

TEST_CASE("cf users with empty history know nothing") {
  TrainingMatrix m = hand_matrix();
  m.items_of_user[0].clear();
  m.users_of_item = {{1}, {}, {1}, {}};
  m.finalize_degrees();
  const PopulationModel pop = micro_population();
  Rng rng(1);
  for (RecommenderKind kind : {RecommenderKind::item_cf, RecommenderKind::user_cf}) {
    const auto scores = score_items(kind, m, pop, 0, {0, 1, 2, 3}, rng);
    for (const auto& s : scores) CHECK_FALSE(s.known);
  }
}

TEST_CASE("oracle ranks by mean utility and ignores training data") {
  const PopulationModel pop = micro_population();
  TrainingMatrix empty;
  Rng rng(1);
  const auto scores = score_items(RecommenderKind::oracle, empty, pop, 0, {0, 1, 2, 3}, rng);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    CHECK(scores[k].known);
    CHECK(scores[k].score == doctest::Approx(pop.mean_utility(0, scores[k].item)));
  }

  // Perturbing the matrix changes nothing, bit for bit.
  Rng rng_a(7), rng_b(7);
  const auto a = score_items(RecommenderKind::oracle, empty, pop, 0, {0, 1, 2}, rng_a);
  const auto b = score_items(RecommenderKind::oracle, hand_matrix(), pop, 0, {0, 1, 2}, rng_b);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].score == b[k].score);
}

TEST_CASE("random scores are matrix-independent given the stream") {
  const PopulationModel pop = micro_population();
  TrainingMatrix empty;
  Rng rng_a(7), rng_b(7);
  const auto a = score_items(RecommenderKind::random, empty, pop, 0, {0, 1, 2}, rng_a);
  const auto b = score_items(RecommenderKind::random, hand_matrix(), pop, 0, {0, 1, 2}, rng_b);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].known);
    CHECK(a[k].score == b[k].score);
  }
}

TEST_CASE("duplicating every user row rescales cf scores without reordering") {
  const TrainingMatrix base = hand_matrix();
  TrainingMatrix doubled;
  doubled.n_users = 4;
  doubled.n_items = 4;
  doubled.as_of = base.as_of;
  doubled.design = base.design;
  doubled.scope_arm = base.scope_arm;
  doubled.items_of_user = {{0, 1}, {0, 2}, {0, 1}, {0, 2}};
  doubled.users_of_item = {{0, 1, 2, 3}, {0, 2}, {1, 3}, {}};
  doubled.finalize_degrees();

  SimParams p = micro_params();
  p.n_users = 4;
  const PopulationModel pop = PopulationModel::build(p, 9);

  for (RecommenderKind kind : {RecommenderKind::item_cf, RecommenderKind::user_cf}) {
    Rng rng(1);
    const auto before = score_items(kind, base, micro_population(), 0, {1, 2}, rng);
    const auto after = score_items(kind, doubled, pop, 0, {1, 2}, rng);
    REQUIRE(before.size() == after.size());
    // Known set is unchanged and the relative order of scores is preserved.
    for (std::size_t k = 0; k < before.size(); ++k) CHECK(before[k].known == after[k].known);
    CHECK((before[0].score < before[1].score) == (after[0].score < after[1].score));
  }
}

TEST_CASE("interleave: no unknowns means pure descending order") {
  Rng rng(3);
  std::vector<ItemScore> scores{
      {0, 0.2, true}, {1, 0.9, true}, {2, 0.5, true}, {3, 0.5, true}};
  const auto ranked = rank_with_interleave(scores, rng);
  // Ties broken by ascending item id: 1, then {2, 3} at 0.5, then 0.
  CHECK(ranked == std::vector<std::int32_t>{1, 2, 3, 0});
}

TEST_CASE("interleave output is always a permutation of the input") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ItemScore> scores;
    const int n = 1 + static_cast<int>(rng.uniform_int(8));
    for (int i = 0; i < n; ++i) {
      scores.push_back({i, rng.uniform(), rng.bernoulli(0.6)});
    }
    auto ranked = rank_with_interleave(scores, rng);
    std::sort(ranked.begin(), ranked.end());
    for (int i = 0; i < n; ++i) CHECK(ranked[i] == i);
  }
}

TEST_CASE("all-unknown interleave is a uniform permutation") {
  Rng rng(5);
  const int n = 4;
  const int draws = 10000;
  // position counts per item
  std::vector<std::vector<int>> counts(n, std::vector<int>(n, 0));
  std::vector<ItemScore> scores;
  for (int i = 0; i < n; ++i) scores.push_back({i, 0.0, false});
  for (int k = 0; k < draws; ++k) {
    const auto ranked = rank_with_interleave(scores, rng);
    for (int pos = 0; pos < n; ++pos) ++counts[ranked[pos]][pos];
  }
  const double expect = static_cast<double>(draws) / n;
  const double sd = std::sqrt(expect * (1.0 - 1.0 / n));
  for (int i = 0; i < n; ++i) {
    for (int pos = 0; pos < n; ++pos) {
      CHECK(std::fabs(counts[i][pos] - expect) < 5.0 * sd);
    }
  }
}

TEST_CASE("single unknown lands uniformly among k+1 slots") {
  Rng rng(6);
  const int draws = 10000;
  std::vector<int> position_count(4, 0);
  std::vector<ItemScore> scores{
      {0, 0.9, true}, {1, 0.8, true}, {2, 0.7, true}, {9, 0.0, false}};
  for (int k = 0; k < draws; ++k) {
    const auto ranked = rank_with_interleave(scores, rng);
    for (int pos = 0; pos < 4; ++pos) {
      if (ranked[pos] == 9) ++position_count[pos];
    }
  }
  const double expect = draws / 4.0;
  const double sd = std::sqrt(expect * 0.75);
  for (int pos = 0; pos < 4; ++pos) {
    CHECK(std::fabs(position_count[pos] - expect) < 5.0 * sd);
  }
}

TEST_CASE("ranking is deterministic given the stream state") {
  std::vector<ItemScore> scores{
      {0, 0.1, true}, {1, 0.0, false}, {2, 0.7, true}, {3, 0.0, false}};
  Rng a(77), b(77);
  CHECK(rank_with_interleave(scores, a) == rank_with_interleave(scores, b));
}
