#include <doctest.h>

#include <cmath>
#include <vector>

#include "symbiosim/population.hpp"

using namespace symbiosim;

namespace {

SimParams small_params() {
  SimParams p;
  p.n_users = 20;
  p.n_items = 100;
  p.periods = 20;
  p.t_init = 4;
  return p;
}

}  // namespace

TEST_CASE("symmetric dirichlet: per-coordinate mean is 1/10") {
  Rng rng(11);
  std::vector<double> sums(SimParams::dim, 0.0);
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const PreferenceVector v = sample_preference_vector(1.0, 1.0, 10, rng);
    for (int c = 0; c < SimParams::dim; ++c) sums[c] += v.weights[c];
  }
  for (double s : sums) {
    CHECK(std::fabs(s / n - 0.1) < 0.01);
  }
}

TEST_CASE("every preference draw lies on the simplex") {
  Rng rng(12);
  for (int k = 0; k < 2000; ++k) {
    const PreferenceVector v = sample_preference_vector(0.01, 10.0, 4, rng);
    double sum = 0.0;
    for (double w : v.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);
    CHECK(v.cluster_label >= 0);
    CHECK(v.cluster_label < 4);
  }
}

TEST_CASE("boosted coordinate mean matches the dirichlet mean 10/19") {
  Rng rng(13);
  double sum = 0.0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const PreferenceVector v = sample_preference_vector(1.0, 10.0, 10, rng);
    sum += v.weights[v.cluster_label];
  }
  CHECK(std::fabs(sum / n - 10.0 / 19.0) < 0.01);
}

TEST_CASE("preference sampling rejects bad arguments") {
  Rng rng(14);
  CHECK_THROWS_AS(sample_preference_vector(0.0, 1.0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_preference_vector(1.0, -1.0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_preference_vector(1.0, 1.0, 11, rng), std::invalid_argument);
}

TEST_CASE("true utility clamps orthogonal and aligned one-hots") {
  Rng rng(15);
  PreferenceVector e1, e2;
  e1.weights[0] = 1.0;
  e2.weights[1] = 1.0;

  // Orthogonal vectors: the mean sits at the 1e-6 clamp floor.
  double sum = 0.0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) sum += true_utility(e1, e2, 1e-5, rng);
  CHECK(std::fabs(sum / n - 1e-6) < 2e-6);

  // Aligned vectors: the mean sits at the 1 - 1e-6 ceiling.
  sum = 0.0;
  for (int k = 0; k < n; ++k) sum += true_utility(e1, e1, 1e-5, rng);
  CHECK(std::fabs(sum / n - (1.0 - 1e-6)) < 2e-6);
}

TEST_CASE("true utility moments at mu = 0.5") {
  Rng rng(16);
  PreferenceVector rho, v;
  rho.weights[0] = 1.0;
  v.weights[0] = 0.5;
  v.weights[1] = 0.5;  // rho.v = 0.5
  const int n = 10000;
  std::vector<double> draws(n);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    draws[k] = true_utility(rho, v, 1e-5, rng);
    sum += draws[k];
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean - 0.5) < 1e-3);
  double ss = 0.0;
  for (double d : draws) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (n - 1));
  CHECK(sd == doctest::Approx(1e-5).epsilon(0.2));
}

TEST_CASE("degenerate sigma collapses to the mean") {
  Rng rng(17);
  PreferenceVector rho, v;
  rho.weights[0] = 1.0;
  v.weights[0] = 0.5;
  v.weights[1] = 0.5;
  // sigma^2 = 0.36 >= 0.25 = mu(1-mu)
  CHECK(true_utility(rho, v, 0.6, rng) == 0.5);
}

TEST_CASE("perceived utility follows rank decay") {
  CHECK(perceived_utility(0.8, 1, 0.8) == doctest::Approx(0.8));
  CHECK(perceived_utility(0.8, 5, 0.0) == doctest::Approx(0.8));
  CHECK(perceived_utility(0.8, 2, 0.8) == doctest::Approx(0.8 * std::pow(2.0, -0.8)).epsilon(1e-9));
  CHECK(std::fabs(perceived_utility(0.8, 2, 0.8) - 0.45948) < 1e-5);
  CHECK_THROWS_AS(perceived_utility(0.8, 0, 0.8), std::invalid_argument);
}

TEST_CASE("perceived utility is nonincreasing in rank") {
  double prev = perceived_utility(0.7, 1, 0.8);
  for (int r = 2; r <= 50; ++r) {
    const double cur = perceived_utility(0.7, r, 0.8);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("reserve utility is the median") {
  CHECK(reserve_utility({0.1, 0.2, 0.3}) == doctest::Approx(0.2));
  CHECK(reserve_utility({0.4, 0.1, 0.3, 0.2}) == doctest::Approx(0.25));
  CHECK(reserve_utility({0.7, 0.7, 0.7}) == doctest::Approx(0.7));
  CHECK_THROWS_AS(reserve_utility({}), std::invalid_argument);
}

TEST_CASE("population build is deterministic and schedules releases evenly") {
  const SimParams params = small_params();
  const PopulationModel a = PopulationModel::build(params, 99);
  const PopulationModel b = PopulationModel::build(params, 99);

  for (int u = 0; u < params.n_users; ++u) {
    CHECK(a.reserve(u) == b.reserve(u));
    for (int i = 0; i < params.n_items; ++i) {
      CHECK(a.utility(u, i) == b.utility(u, i));  // bit-identical
    }
  }
  for (int i = 0; i < params.n_items; ++i) {
    CHECK(a.release_period(i) == b.release_period(i));
    CHECK(a.release_period(i) >= 1);
    CHECK(a.release_period(i) <= params.periods);
  }
  int cumulative = 0;
  for (int t = 1; t <= params.periods; ++t) {
    CHECK(static_cast<int>(a.released_at(t).size()) == params.items_per_period());
    cumulative += static_cast<int>(a.released_at(t).size());
    CHECK(cumulative == t * params.items_per_period());
  }

  const PopulationModel c = PopulationModel::build(params, 100);
  bool any_diff = false;
  for (int i = 0; i < params.n_items && !any_diff; ++i) {
    any_diff = c.utility(0, i) != a.utility(0, i);
  }
  CHECK(any_diff);
}

TEST_CASE("cached utilities stay within [0,1] and lookups are stable") {
  const SimParams params = small_params();
  const PopulationModel pop = PopulationModel::build(params, 5);
  for (int u = 0; u < params.n_users; ++u) {
    for (int i = 0; i < params.n_items; ++i) {
      const double v = pop.utility(u, i);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(pop.utility(u, i) == v);
    }
  }
}

TEST_CASE("reserves equal the median of the cached utility row") {
  const SimParams params = small_params();
  const PopulationModel pop = PopulationModel::build(params, 6);
  for (int u = 0; u < params.n_users; ++u) {
    std::vector<double> row(params.n_items);
    for (int i = 0; i < params.n_items; ++i) row[i] = pop.utility(u, i);
    CHECK(pop.reserve(u) == reserve_utility(row));  // bit-identical recomputation
  }
}
