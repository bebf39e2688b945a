#pragma once

#include <string>
#include <vector>

#include "symbiosim/interaction_log.hpp"
#include "symbiosim/kinds.hpp"
#include "symbiosim/params.hpp"
#include "symbiosim/population.hpp"
#include "symbiosim/rng.hpp"

namespace symbiosim {

// Immutable description of one randomized experiment: who is in which arm,
// which algorithm each arm runs, and when randomization happened.
struct ExperimentPlan {
  DesignKind design = DesignKind::naive;
  std::vector<Arm> user_arm;
  std::vector<Arm> item_arm;    // co-diverted only; empty otherwise
  std::vector<int> cluster_of;  // clustered only; empty otherwise
  double split_prob = 0.5;
  RecommenderKind algo_treatment = RecommenderKind::random;
  RecommenderKind algo_control = RecommenderKind::random;
  int randomized_at = 0;  // = t_init; assignments take effect after this period
  std::vector<std::string> warnings;

  RecommenderKind algo_for(Arm arm) const {
    return arm == Arm::treatment ? algo_treatment : algo_control;
  }
  int treated_users() const;
  int treated_items() const;
};

// Completely randomized assignment at the design's granularity: exactly
// floor(p * n_users) treated users (naive/data-diverted), floor(p * K)
// treated clusters of the population's ground-truth user clusters
// (clustered), or floor(p * n_users) users plus floor(p * n_items) items
// (co-diverted).
ExperimentPlan make_assignment(DesignKind design, const PopulationModel& population,
                               const SimParams& params, RecommenderKind algo_treatment,
                               RecommenderKind algo_control, Rng& rng);

// Single-item visibility predicate; identity except co-diversion after
// randomization, which hides other-arm items.
bool item_visible(const ExperimentPlan& plan, int user, int item, int period);

// Filtered copy of `available`, preserving order.
std::vector<std::int32_t> visible_items(const ExperimentPlan& plan, int user,
                                        const std::vector<std::int32_t>& available,
                                        int period);

// Which interaction records an arm's training data may contain.
struct DataScope {
  DesignKind design = DesignKind::naive;
  Arm arm = Arm::control;
  int randomized_at = 0;

  bool operator()(const InteractionRecord& rec) const {
    if (design == DesignKind::naive || design == DesignKind::clustered) return true;
    return rec.period <= randomized_at || rec.arm == static_cast<std::int8_t>(arm);
  }
};

DataScope data_scope(const ExperimentPlan& plan, Arm arm);

}  // namespace symbiosim
