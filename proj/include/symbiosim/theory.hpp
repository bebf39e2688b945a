#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "symbiosim/kinds.hpp"

namespace symbiosim {

// Equilibrium potential-outcome instance: unit i's outcome under assignment
// vector z is
//
//   Y_i(z) = beta[z_i] + delta[z_i] * corpus + sum_j w(i,j) * gamma[z_i][z_j]
//
// with design-specific twists for diverted experiments (see
// brute_force_bias). `gamma[a][b]` is the indirect effect on a unit in arm
// `a` of a unit in arm `b`.
struct TheoryInstance {
  int n = 0;
  std::vector<double> w;  // n x n, row-major, nonnegative; diagonal allowed
  std::array<std::array<double, 2>, 2> gamma{{{0.0, 0.0}, {0.0, 0.0}}};
  std::array<double, 2> beta{0.0, 0.0};
  std::array<double, 2> delta{0.0, 0.0};
  double corpus = 0.0;       // M
  std::vector<int> clusters; // per-unit label; required by clustered ops
  double split_prob = 0.5;   // p

  double w_at(int i, int j) const { return w[static_cast<std::size_t>(i) * n + j]; }
  int cluster_count() const;
  void validate() const;  // throws std::invalid_argument
};

// Per-unit heterogeneous variant:
//   Y_i(z) = alpha_i + beta_i z_i + (gamma_i + delta_i z_i) sum_j w(i,j) z_j
struct ExtendedInstance {
  int n = 0;
  std::vector<double> w;
  std::vector<double> alpha, beta, gamma, delta;  // per unit
  std::vector<int> clusters;
  double split_prob = 0.5;

  double w_at(int i, int j) const { return w[static_cast<std::size_t>(i) * n + j]; }
  int cluster_count() const;
};

// Total treatment effect:
//   (beta1-beta0) + M(delta1-delta0) + (1/N) sum_i sum_j w_ij (g11-g00),
// diagonal included.
double compute_tte(const TheoryInstance& inst);

// Closed-form bias of the sample-mean estimator at p = 1/2 (the only split
// the closed forms are stated for; other p is rejected):
//   naive         (1/N) sum_{i != j} w_ij (−g11 + g10 − g01 + g00)/2
//   clustered     same summand restricted to cross-cluster pairs
//   data_diverted (1/N) sum_{i != j} w_ij (g00 − g11)/2
//   co_diverted   data_diverted + M (d0 − d1)/2
double bias_closed_form(const TheoryInstance& inst, DesignKind design);

// bias(data_diverted) − bias(clustered) in its displayed within/cross-
// cluster decomposition.
double design_bias_gap(const TheoryInstance& inst);

// Exhaustive expectation of the Horvitz-Thompson estimator (sums normalized
// by 1/(Np) and 1/(N(1-p))) over all Bernoulli(p) assignments — per unit
// for naive/diverted designs, per cluster for the clustered design — minus
// the TTE. Potential-outcome semantics per design:
//   naive/clustered  full gamma[z_i][z_j] coupling
//   data_diverted    coupling gated by 1{z_i == z_j}
//   co_diverted      gated coupling, and corpus term delta[z_i] * M / 2
// Capacity: at most 20 enumeration bits.
double brute_force_bias(const TheoryInstance& inst, DesignKind design);

// Fraction of total off-diagonal weight that crosses cluster boundaries;
// 0 when there is no off-diagonal weight.
double cluster_cut_quality(const std::vector<double>& w, const std::vector<int>& clusters);

// Cross-cluster cut reweighted by gamma_i + delta_i(1-p), as an unnormalized
// sum; `normalize` divides by N for comparability with the per-unit biases.
double extended_cluster_bias(const ExtendedInstance& inst, bool normalize = false);

// sqrt(N/C): the heuristic RMSE growth factor of moving from N Bernoulli
// units to C balanced clusters. C == 1 is degenerate (nothing left to
// randomize); callers may warn via rmse_inflation_degenerate.
double rmse_inflation(int n_units, int n_clusters);
inline bool rmse_inflation_degenerate(int n_clusters) { return n_clusters == 1; }

// Folds a binary user x item incidence into the unit-unit co-engagement
// graph W = R R^T (diagonal = user degree).
std::vector<double> fold_bipartite_graph(const std::vector<std::uint8_t>& incidence,
                                         int n_units, int n_items);

}  // namespace symbiosim
