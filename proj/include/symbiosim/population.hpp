#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "symbiosim/params.hpp"
#include "symbiosim/rng.hpp"

namespace symbiosim {

// A point on the 10-simplex plus the cluster coordinate it was boosted on.
// Used for both user preferences and item attributes.
struct PreferenceVector {
  std::array<double, SimParams::dim> weights{};
  int cluster_label = 0;
};

// Draws a near-symmetric Dirichlet vector: the cluster label is uniform on
// {0, ..., n_clusters-1} and that coordinate's concentration is scaled by
// `boost`. The boosted coordinates are the first n_clusters coordinates
// (coordinates are exchangeable, so the fixed choice is unobservable).
PreferenceVector sample_preference_vector(double concentration, double boost,
                                          int n_clusters, Rng& rng);

// One draw of the true consumption utility: Beta with mean rho.v (clamped
// to [eps, 1-eps]) and standard deviation sigma, via moment-matched shape
// parameters. Collapses to the mean when sigma^2 >= mu(1-mu).
double true_utility(const PreferenceVector& rho, const PreferenceVector& v,
                    double sigma, Rng& rng);

// util * rank^-d; rank 1 carries no penalty.
double perceived_utility(double util, int rank, double rank_decay);

// Median; even-length lists take the mean of the two middle order
// statistics.
double reserve_utility(const std::vector<double>& utilities);

// The immutable synthetic world one replication runs against: preferences,
// attributes, cached true utilities, reserves and the item release
// schedule, all derived from a single seed.
class PopulationModel {
 public:
  static PopulationModel build(const SimParams& params, std::uint64_t seed);

  int n_users() const { return static_cast<int>(users_.size()); }
  int n_items() const { return static_cast<int>(items_.size()); }

  const PreferenceVector& user(int u) const { return users_[u]; }
  const PreferenceVector& item(int i) const { return items_[i]; }

  // Cached true utility of (user, item); identical on every lookup.
  double utility(int u, int i) const { return utilities_[static_cast<std::size_t>(u) * items_.size() + i]; }
  const double* utility_row(int u) const { return &utilities_[static_cast<std::size_t>(u) * items_.size()]; }

  // Mean utility rho_u . v_i, the oracle's scoring quantity (precomputed).
  double mean_utility(int u, int i) const { return mean_utilities_[static_cast<std::size_t>(u) * items_.size() + i]; }
  const double* mean_utility_row(int u) const { return &mean_utilities_[static_cast<std::size_t>(u) * items_.size()]; }

  double reserve(int u) const { return reserves_[u]; }

  // Release period of an item, in [1, T].
  int release_period(int i) const { return release_period_[i]; }

  // Items released at exactly period t (1-based), ascending item id.
  const std::vector<std::int32_t>& released_at(int t) const { return released_at_[t]; }

  std::vector<int> user_cluster_labels() const;

  std::uint64_t seed() const { return seed_; }

 private:
  PopulationModel() = default;

  std::vector<PreferenceVector> users_;
  std::vector<PreferenceVector> items_;
  std::vector<double> utilities_;       // n_users x n_items, row-major
  std::vector<double> mean_utilities_;  // rho_u . v_i
  std::vector<double> reserves_;
  std::vector<int> release_period_;
  std::vector<std::vector<std::int32_t>> released_at_;  // index 0 unused
  std::uint64_t seed_ = 0;
};

}  // namespace symbiosim
