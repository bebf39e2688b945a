#include "symbiosim/designs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace symbiosim {

namespace {

// Marks exactly floor(p * n) of n indices as treated, by shuffle.
std::vector<Arm> randomize_units(int n, double p, Rng& rng) {
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const int treated = static_cast<int>(std::floor(p * n));
  std::vector<Arm> arm(n, Arm::control);
  for (int k = 0; k < treated; ++k) arm[order[k]] = Arm::treatment;
  return arm;
}

}  // namespace

int ExperimentPlan::treated_users() const {
  return static_cast<int>(std::count(user_arm.begin(), user_arm.end(), Arm::treatment));
}

int ExperimentPlan::treated_items() const {
  return static_cast<int>(std::count(item_arm.begin(), item_arm.end(), Arm::treatment));
}

ExperimentPlan make_assignment(DesignKind design, const PopulationModel& population,
                               const SimParams& params, RecommenderKind algo_treatment,
                               RecommenderKind algo_control, Rng& rng) {
  if (!(params.split_prob > 0.0 && params.split_prob < 1.0)) {
    throw std::invalid_argument("p must lie in (0,1)");
  }
  ExperimentPlan plan;
  plan.design = design;
  plan.split_prob = params.split_prob;
  plan.algo_treatment = algo_treatment;
  plan.algo_control = algo_control;
  plan.randomized_at = params.t_init;

  const int n_users = population.n_users();
  switch (design) {
    case DesignKind::naive:
    case DesignKind::data_diverted:
      plan.user_arm = randomize_units(n_users, params.split_prob, rng);
      break;
    case DesignKind::clustered: {
      plan.cluster_of = population.user_cluster_labels();
      const int k = params.n_user_clusters;
      if (k < 2) throw std::invalid_argument("cluster randomization needs at least 2 clusters");
      const double exact = params.split_prob * k;
      if (std::floor(exact) != exact) {
        plan.warnings.push_back("p * N_Cu is not integral; flooring the treated cluster count");
      }
      const std::vector<Arm> cluster_arm = randomize_units(k, params.split_prob, rng);
      plan.user_arm.resize(n_users);
      for (int u = 0; u < n_users; ++u) plan.user_arm[u] = cluster_arm[plan.cluster_of[u]];
      break;
    }
    case DesignKind::co_diverted:
      plan.user_arm = randomize_units(n_users, params.split_prob, rng);
      plan.item_arm = randomize_units(population.n_items(), params.split_prob, rng);
      break;
  }
  return plan;
}

bool item_visible(const ExperimentPlan& plan, int user, int item, int period) {
  if (plan.design != DesignKind::co_diverted) return true;
  if (period <= plan.randomized_at) return true;
  return plan.item_arm[item] == plan.user_arm[user];
}

std::vector<std::int32_t> visible_items(const ExperimentPlan& plan, int user,
                                        const std::vector<std::int32_t>& available,
                                        int period) {
  std::vector<std::int32_t> out;
  out.reserve(available.size());
  for (std::int32_t item : available) {
    if (item_visible(plan, user, item, period)) out.push_back(item);
  }
  return out;
}

DataScope data_scope(const ExperimentPlan& plan, Arm arm) {
  return DataScope{plan.design, arm, plan.randomized_at};
}

}  // namespace symbiosim
