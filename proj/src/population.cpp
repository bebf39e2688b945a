#include "symbiosim/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace symbiosim {

PreferenceVector sample_preference_vector(double concentration, double boost,
                                          int n_clusters, Rng& rng) {
  if (concentration <= 0.0) throw std::invalid_argument("concentration must be positive");
  if (boost <= 0.0) throw std::invalid_argument("boost must be positive");
  if (n_clusters < 1 || n_clusters > SimParams::dim) {
    throw std::invalid_argument("n_clusters must lie in [1, 10]");
  }
  const int label = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_clusters)));
  std::vector<double> alphas(SimParams::dim, concentration);
  alphas[label] = boost * concentration;
  std::vector<double> draw;
  rng.dirichlet(alphas, draw);
  PreferenceVector out;
  std::copy(draw.begin(), draw.end(), out.weights.begin());
  out.cluster_label = label;
  return out;
}

double true_utility(const PreferenceVector& rho, const PreferenceVector& v,
                    double sigma, Rng& rng) {
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  double mu = 0.0;
  for (int k = 0; k < SimParams::dim; ++k) mu += rho.weights[k] * v.weights[k];
  mu = std::clamp(mu, kUtilityMeanClamp, 1.0 - kUtilityMeanClamp);
  const double var = sigma * sigma;
  if (var >= mu * (1.0 - mu)) return mu;  // degenerate: point mass at the mean
  const double nu = mu * (1.0 - mu) / var - 1.0;
  return rng.beta(mu * nu, (1.0 - mu) * nu);
}

double perceived_utility(double util, int rank, double rank_decay) {
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  return util * std::pow(static_cast<double>(rank), -rank_decay);
}

double reserve_utility(const std::vector<double>& utilities) {
  if (utilities.empty()) throw std::invalid_argument("reserve of an empty list");
  std::vector<double> sorted = utilities;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

// Construction order (one stream, fixed): users, items, utilities in
// (user, item) order, release permutation. Reserves are derived, no draws.
PopulationModel PopulationModel::build(const SimParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);

  PopulationModel pop;
  pop.seed_ = seed;
  pop.users_.reserve(params.n_users);
  for (int u = 0; u < params.n_users; ++u) {
    pop.users_.push_back(sample_preference_vector(params.alpha_user, params.gamma_pref,
                                                  params.n_user_clusters, rng));
  }
  pop.items_.reserve(params.n_items);
  for (int i = 0; i < params.n_items; ++i) {
    pop.items_.push_back(sample_preference_vector(params.alpha_item, params.gamma_item,
                                                  params.n_item_clusters, rng));
  }

  pop.utilities_.resize(static_cast<std::size_t>(params.n_users) * params.n_items);
  pop.mean_utilities_.resize(pop.utilities_.size());
  for (int u = 0; u < params.n_users; ++u) {
    for (int i = 0; i < params.n_items; ++i) {
      const std::size_t cell = static_cast<std::size_t>(u) * params.n_items + i;
      pop.utilities_[cell] =
          true_utility(pop.users_[u], pop.items_[i], params.sigma_util, rng);
      const auto& rho = pop.users_[u].weights;
      const auto& v = pop.items_[i].weights;
      double mu = 0.0;
      for (int k = 0; k < SimParams::dim; ++k) mu += rho[k] * v[k];
      pop.mean_utilities_[cell] = mu;
    }
  }

  pop.reserves_.resize(params.n_users);
  std::vector<double> row(params.n_items);
  for (int u = 0; u < params.n_users; ++u) {
    const double* base = &pop.utilities_[static_cast<std::size_t>(u) * params.n_items];
    std::copy(base, base + params.n_items, row.begin());
    pop.reserves_[u] = reserve_utility(row);
  }

  // Uniform random catalog permutation split into T equal release blocks.
  std::vector<std::int32_t> order(params.n_items);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const int per_period = params.items_per_period();
  pop.release_period_.resize(params.n_items);
  pop.released_at_.assign(params.periods + 1, {});
  for (int i = 0; i < params.n_items; ++i) {
    const int t = 1 + i / per_period;
    pop.release_period_[order[i]] = t;
    pop.released_at_[t].push_back(order[i]);
  }
  for (auto& block : pop.released_at_) std::sort(block.begin(), block.end());

  return pop;
}

std::vector<int> PopulationModel::user_cluster_labels() const {
  std::vector<int> labels(users_.size());
  for (std::size_t u = 0; u < users_.size(); ++u) labels[u] = users_[u].cluster_label;
  return labels;
}

}  // namespace symbiosim
