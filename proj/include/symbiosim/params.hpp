#pragma once

#include <cstdint>

namespace symbiosim {

// Beta-mean clamp for utility draws; also bounds the admissible utility
// noise (sigma_util^2 must stay below eps*(1-eps)).
inline constexpr double kUtilityMeanClamp = 1e-6;

// Simulation parameters. Field names follow their role; the config file
// keys use the conventional short symbols (see config.cpp).
struct SimParams {
  static constexpr int dim = 10;  // preference/attribute dimensionality

  int n_users = 100;
  int n_items = 1000;
  int periods = 100;         // T
  int t_init = 10;           // warm-up length; randomization happens here
  double rank_decay = 0.8;   // d: perceived utility = util * rank^-d
  int retrain_every = 1;     // f
  double split_prob = 0.5;   // p
  double alpha_user = 1.0;   // Dirichlet concentration for user preferences
  double alpha_item = 0.01;  // Dirichlet concentration for item attributes
  int n_user_clusters = 10;  // N_Cu
  int n_item_clusters = 4;   // N_Ci
  double gamma_pref = 1.0;   // boost on a user's cluster coordinate
  double gamma_item = 1.0;   // boost on an item's cluster coordinate
  double sigma_util = 1e-5;  // utility noise std
  std::uint64_t seed = 1;    // base seed; all streams derive from it

  // When true, take-up counts only post-randomization periods.
  bool take_up_post_randomization_only = false;

  int items_per_period() const { return n_items / periods; }

  // Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

}  // namespace symbiosim
