#include "symbiosim/recommenders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symbiosim {

std::int64_t TrainingMatrix::entry_count() const {
  std::int64_t n = 0;
  for (const auto& row : items_of_user) n += static_cast<std::int64_t>(row.size());
  return n;
}

TrainingMatrix build_training_matrix(const InteractionLog& log, const ExperimentPlan& plan,
                                     Arm arm, int as_of) {
  TrainingMatrix m;
  m.n_users = log.n_users();
  m.n_items = log.n_items();
  m.as_of = as_of;
  m.design = plan.design;
  m.scope_arm = arm;
  m.items_of_user.resize(m.n_users);
  m.users_of_item.resize(m.n_items);
  const DataScope scope = data_scope(plan, arm);
  for (const InteractionRecord& rec : log.records()) {
    if (rec.period >= as_of) continue;
    if (!scope(rec)) continue;
    m.items_of_user[rec.user].push_back(rec.item);
    m.users_of_item[rec.item].push_back(rec.user);
  }
  for (auto& row : m.items_of_user) std::sort(row.begin(), row.end());
  for (auto& col : m.users_of_item) std::sort(col.begin(), col.end());
  m.finalize_degrees();
  return m;
}

void TrainingMatrix::finalize_degrees() {
  inv_sqrt_user_degree.resize(n_users);
  for (int u = 0; u < n_users; ++u) {
    const int deg = user_degree(u);
    inv_sqrt_user_degree[u] = deg > 0 ? 1.0 / std::sqrt(static_cast<double>(deg)) : 0.0;
  }
  inv_sqrt_item_degree.resize(n_items);
  for (int i = 0; i < n_items; ++i) {
    const int deg = item_degree(i);
    inv_sqrt_item_degree[i] = deg > 0 ? 1.0 / std::sqrt(static_cast<double>(deg)) : 0.0;
  }
}

namespace {

// itemcf: score(i) = sum_{j in consumed(u)} cos(col_i, col_j). Computed in
// two sparse passes via t[v] = sum_{j in consumed(u) & consumed-by-v}
// 1/sqrt(deg_j), so score(i) = (1/sqrt(deg_i)) * sum_{v consumed i} t[v].
void score_item_cf(const TrainingMatrix& matrix, int user,
                   const std::vector<std::int32_t>& candidates, CfScratch& scratch,
                   std::vector<ItemScore>& out) {
  const auto& consumed = matrix.items_of_user[user];
  if (consumed.empty()) return;  // every candidate stays unknown
  std::vector<double>& t = scratch.user_weight;
  t.assign(matrix.n_users, 0.0);
  for (std::int32_t j : consumed) {
    const double wj = matrix.inv_sqrt_item_degree[j];
    for (std::int32_t v : matrix.users_of_item[j]) t[v] += wj;
  }
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const std::int32_t i = candidates[k];
    const auto& consumers = matrix.users_of_item[i];
    if (consumers.empty()) continue;
    double s = 0.0;
    for (std::int32_t v : consumers) s += t[v];
    out[k].score = s * matrix.inv_sqrt_item_degree[i];
    out[k].known = true;
  }
}

// usercf: score(i) = sum_v cos(row_u, row_v) * R[v, i], with cos computed
// from overlap counts gathered in one sparse pass over u's history.
void score_user_cf(const TrainingMatrix& matrix, int user,
                   const std::vector<std::int32_t>& candidates, CfScratch& scratch,
                   std::vector<ItemScore>& out) {
  const auto& row = matrix.items_of_user[user];
  if (row.empty()) return;  // every candidate stays unknown
  std::vector<double>& overlap = scratch.user_weight;
  overlap.assign(matrix.n_users, 0.0);
  for (std::int32_t j : row) {
    for (std::int32_t v : matrix.users_of_item[j]) overlap[v] += 1.0;
  }
  const double inv_u = matrix.inv_sqrt_user_degree[user];
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const std::int32_t i = candidates[k];
    const auto& consumers = matrix.users_of_item[i];
    if (consumers.empty()) continue;
    double s = 0.0;
    for (std::int32_t v : consumers) s += overlap[v] * matrix.inv_sqrt_user_degree[v];
    out[k].score = s * inv_u;
    out[k].known = true;
  }
}

}  // namespace

void score_items_into(RecommenderKind kind, const TrainingMatrix& matrix,
                      const PopulationModel& population, int user,
                      const std::vector<std::int32_t>& candidates, Rng& rng,
                      CfScratch& scratch, std::vector<ItemScore>& out) {
  if (candidates.empty()) throw std::invalid_argument("score_items: no candidates");
  out.resize(candidates.size());

  switch (kind) {
    case RecommenderKind::oracle: {
      const double* mu = population.mean_utility_row(user);
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        out[k] = {candidates[k], mu[candidates[k]], true};
      }
      break;
    }
    case RecommenderKind::random:
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        out[k] = {candidates[k], rng.uniform(), true};
      }
      break;
    case RecommenderKind::item_cf:
    case RecommenderKind::user_cf:
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        out[k] = {candidates[k], 0.0, false};
      }
      if (kind == RecommenderKind::item_cf) {
        score_item_cf(matrix, user, candidates, scratch, out);
      } else {
        score_user_cf(matrix, user, candidates, scratch, out);
      }
      break;
  }
}

std::vector<ItemScore> score_items(RecommenderKind kind, const TrainingMatrix& matrix,
                                   const PopulationModel& population, int user,
                                   const std::vector<std::int32_t>& candidates, Rng& rng) {
  CfScratch scratch;
  std::vector<ItemScore> out;
  score_items_into(kind, matrix, population, user, candidates, rng, scratch, out);
  return out;
}

void make_interleave_plan_into(int n_known, Rng& rng, InterleavePlan& plan) {
  const int m = static_cast<int>(plan.unknown_order.size());
  const int n = n_known + m;
  rng.shuffle(plan.unknown_order);
  plan.slot_is_unknown.assign(n, 0);
  // Floyd's sampling of a uniform m-subset of the n final slots.
  for (int j = n - m; j < n; ++j) {
    const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(j) + 1));
    if (!plan.slot_is_unknown[t]) {
      plan.slot_is_unknown[t] = 1;
    } else {
      plan.slot_is_unknown[j] = 1;
    }
  }
}

InterleavePlan make_interleave_plan(int n_known, std::vector<std::int32_t> unknown_items,
                                    Rng& rng) {
  InterleavePlan plan;
  plan.unknown_order = std::move(unknown_items);
  make_interleave_plan_into(n_known, rng, plan);
  return plan;
}

std::vector<std::int32_t> rank_with_interleave(const std::vector<ItemScore>& scores, Rng& rng) {
  std::vector<ItemScore> known;
  std::vector<std::int32_t> unknown;
  known.reserve(scores.size());
  for (const ItemScore& s : scores) {
    if (s.known) {
      known.push_back(s);
    } else {
      unknown.push_back(s.item);
    }
  }
  std::sort(known.begin(), known.end(), [](const ItemScore& a, const ItemScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
  const InterleavePlan plan =
      make_interleave_plan(static_cast<int>(known.size()), std::move(unknown), rng);

  std::vector<std::int32_t> ranked(scores.size());
  std::size_t next_known = 0, next_unknown = 0;
  for (std::size_t slot = 0; slot < ranked.size(); ++slot) {
    ranked[slot] = plan.slot_is_unknown[slot] ? plan.unknown_order[next_unknown++]
                                              : known[next_known++].item;
  }
  return ranked;
}

}  // namespace symbiosim
