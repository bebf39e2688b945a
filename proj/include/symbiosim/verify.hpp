#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symbiosim/rng.hpp"
#include "symbiosim/theory.hpp"

namespace symbiosim {

// Tolerances of the verification gate. The enumeration oracle reproduces
// the closed forms exactly under HT normalization, so these only absorb
// floating-point roundoff.
inline constexpr double kOracleTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;

struct VerifyRow {
  int instance = 0;
  std::string check;  // design name or identity/linearity label
  double lhs = 0.0;   // closed form (or identity left side)
  double rhs = 0.0;   // brute force (or identity right side)
  double abs_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyResult {
  std::vector<VerifyRow> rows;
  bool all_pass = true;
  int failures = 0;
};

// Random instance in the acceptance envelope: n in [4, 10], W entries
// uniform [0,1] (diagonal included), gamma uniform [-1,1], beta and delta
// uniform [0,1], corpus size integer in [0, 20], 2-3 balanced clusters,
// p = 1/2.
TheoryInstance random_instance(Rng& rng);

// Runs, per random instance:
//   - closed form vs exhaustive HT expectation for all four designs (1e-9)
//   - design_bias_gap vs bias(data_diverted) - bias(clustered)   (1e-12)
//   - linearity of every design bias under W -> cW, c in {0.5, 2} (1e-12)
//   - clustered bias == 0 exactly on the block-diagonal restriction of W
VerifyResult run_verification(int n_instances, std::uint64_t seed);

}  // namespace symbiosim
