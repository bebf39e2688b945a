#include "symbiosim/params.hpp"

#include <stdexcept>
#include <string>

namespace symbiosim {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("invalid parameters: " + msg);
}

}  // namespace

void SimParams::validate() const {
  if (n_users <= 0) fail("n_users must be positive");
  if (n_items <= 0) fail("n_items must be positive");
  if (periods <= 0) fail("T must be positive");
  if (!(split_prob > 0.0 && split_prob < 1.0)) fail("p must lie in (0,1)");
  if (t_init < 0 || t_init >= periods) fail("t_init must lie in [0, T)");
  if (n_items % periods != 0) fail("n_items must be divisible by T");
  if (rank_decay < 0.0) fail("d must be nonnegative");
  if (retrain_every < 1) fail("f must be at least 1");
  if (alpha_user <= 0.0) fail("alpha_u must be positive");
  if (alpha_item <= 0.0) fail("alpha_i must be positive");
  if (n_user_clusters < 1 || n_user_clusters > dim) fail("N_Cu must lie in [1, 10]");
  if (n_item_clusters < 1 || n_item_clusters > dim) fail("N_Ci must lie in [1, 10]");
  if (gamma_pref <= 0.0) fail("gamma_pref must be positive");
  if (gamma_item <= 0.0) fail("gamma_item must be positive");
  if (sigma_util <= 0.0) fail("sigma_util must be positive");
  // Keeps the Beta(mu, sigma) parameterization proper over the whole
  // reachable (clamped) mean range.
  const double floor_var = kUtilityMeanClamp * (1.0 - kUtilityMeanClamp);
  if (sigma_util * sigma_util >= floor_var) {
    fail("sigma_util^2 must stay below the clamped-mean variance floor");
  }
}

}  // namespace symbiosim
