#pragma once

#include <cstdint>
#include <vector>

#include "symbiosim/designs.hpp"
#include "symbiosim/interaction_log.hpp"
#include "symbiosim/kinds.hpp"
#include "symbiosim/population.hpp"
#include "symbiosim/rng.hpp"

namespace symbiosim {

// Arm-scoped binary incidence snapshot of the log, stored sparsely in both
// orientations. An entry exists iff the record's period is strictly before
// `as_of` and the record passes the arm's data scope.
struct TrainingMatrix {
  int n_users = 0;
  int n_items = 0;
  int as_of = 0;
  DesignKind design = DesignKind::naive;
  Arm scope_arm = Arm::control;
  std::vector<std::vector<std::int32_t>> items_of_user;  // ascending item id
  std::vector<std::vector<std::int32_t>> users_of_item;  // ascending user id
  // 1/sqrt(degree), 0 for empty rows/columns; filled at build time.
  std::vector<double> inv_sqrt_user_degree;
  std::vector<double> inv_sqrt_item_degree;

  int user_degree(int u) const { return static_cast<int>(items_of_user[u].size()); }
  int item_degree(int i) const { return static_cast<int>(users_of_item[i].size()); }
  std::int64_t entry_count() const;

  // Recomputes the inverse-sqrt degree caches from the adjacency lists.
  // Required after assembling a matrix by hand.
  void finalize_degrees();
};

TrainingMatrix build_training_matrix(const InteractionLog& log, const ExperimentPlan& plan,
                                     Arm arm, int as_of);

// One candidate's score; `known` is false for items the algorithm has no
// signal on (all-zero training column, or an empty user history for the
// collaborative filters).
struct ItemScore {
  std::int32_t item = 0;
  double score = 0.0;
  bool known = false;
};

// Reusable accumulator for the collaborative-filter scorers (one slot per
// user). Purely an allocation cache; results never depend on prior content.
struct CfScratch {
  std::vector<double> user_weight;
};

// Scores `candidates` for `user`:
//   oracle  mean utility rho_u . v_i (training data ignored)
//   random  i.i.d. uniform draws
//   itemcf  sum over consumed j of cos(col_i, col_j)
//   usercf  sum over users v of cos(row_u, row_v) * R[v, i]
// Output order follows `candidates`.
std::vector<ItemScore> score_items(RecommenderKind kind, const TrainingMatrix& matrix,
                                   const PopulationModel& population, int user,
                                   const std::vector<std::int32_t>& candidates, Rng& rng);
// Buffer-reusing form for hot loops; identical output and RNG consumption.
void score_items_into(RecommenderKind kind, const TrainingMatrix& matrix,
                      const PopulationModel& population, int user,
                      const std::vector<std::int32_t>& candidates, Rng& rng,
                      CfScratch& scratch, std::vector<ItemScore>& out);

// Placement plan for unknown items: a uniformly shuffled unknown order plus
// a uniform choice of which final slots they occupy. Equivalent in
// distribution to inserting each unknown one at a time at a uniform
// position (sequential uniform insertion), but O(k + m).
struct InterleavePlan {
  std::vector<std::int32_t> unknown_order;
  std::vector<std::uint8_t> slot_is_unknown;  // length k + m
};

InterleavePlan make_interleave_plan(int n_known, std::vector<std::int32_t> unknown_items,
                                    Rng& rng);
// In-place form: plan.unknown_order must already hold the unknown items (in
// candidate order); draws the same RNG sequence as make_interleave_plan.
void make_interleave_plan_into(int n_known, Rng& rng, InterleavePlan& plan);

// Known items in descending score order (ties by ascending item id), with
// unknown items interleaved uniformly at random.
std::vector<std::int32_t> rank_with_interleave(const std::vector<ItemScore>& scores, Rng& rng);

}  // namespace symbiosim
