#include "symbiosim/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace symbiosim {

namespace {

int count_distinct(const std::vector<int>& labels) {
  std::unordered_set<int> seen(labels.begin(), labels.end());
  return static_cast<int>(seen.size());
}

void require_clusters(const TheoryInstance& inst) {
  if (inst.clusters.size() != static_cast<std::size_t>(inst.n)) {
    throw std::invalid_argument("instance lacks per-unit cluster labels");
  }
}

}  // namespace

int TheoryInstance::cluster_count() const { return count_distinct(clusters); }
int ExtendedInstance::cluster_count() const { return count_distinct(clusters); }

void TheoryInstance::validate() const {
  if (n <= 0) throw std::invalid_argument("instance needs at least one unit");
  if (w.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("weight matrix must be n x n");
  }
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("weights must be nonnegative");
  }
  if (!(split_prob > 0.0 && split_prob < 1.0)) {
    throw std::invalid_argument("split probability must lie in (0,1)");
  }
  if (!clusters.empty() && clusters.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("cluster labels must cover every unit");
  }
}

double compute_tte(const TheoryInstance& inst) {
  inst.validate();
  double coupling = 0.0;
  for (double v : inst.w) coupling += v;
  return (inst.beta[1] - inst.beta[0]) + inst.corpus * (inst.delta[1] - inst.delta[0]) +
         coupling * (inst.gamma[1][1] - inst.gamma[0][0]) / inst.n;
}

double bias_closed_form(const TheoryInstance& inst, DesignKind design) {
  inst.validate();
  if (inst.split_prob != 0.5) {
    throw std::invalid_argument("closed-form biases are stated at p = 1/2 only");
  }
  const auto& g = inst.gamma;
  const double naive_coef = 0.5 * (-g[1][1] + g[1][0] - g[0][1] + g[0][0]);
  const double divert_coef = 0.5 * (g[0][0] - g[1][1]);

  double sum = 0.0;
  switch (design) {
    case DesignKind::naive:
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
          if (i != j) sum += inst.w_at(i, j) * naive_coef;
      return sum / inst.n;
    case DesignKind::clustered:
      require_clusters(inst);
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
          if (i != j && inst.clusters[i] != inst.clusters[j])
            sum += inst.w_at(i, j) * naive_coef;
      return sum / inst.n;
    case DesignKind::data_diverted:
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
          if (i != j) sum += inst.w_at(i, j) * divert_coef;
      return sum / inst.n;
    case DesignKind::co_diverted:
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
          if (i != j) sum += inst.w_at(i, j) * divert_coef;
      return sum / inst.n + inst.corpus * (inst.delta[0] - inst.delta[1]) / 2.0;
  }
  throw std::logic_error("unreachable design kind");
}

double design_bias_gap(const TheoryInstance& inst) {
  inst.validate();
  require_clusters(inst);
  const auto& g = inst.gamma;
  double within = 0.0, cross = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      if (inst.clusters[i] == inst.clusters[j]) {
        within += inst.w_at(i, j);
      } else {
        cross += inst.w_at(i, j);
      }
    }
  }
  return (within * (g[0][0] - g[1][1]) - cross * (g[1][0] - g[0][1])) / (2.0 * inst.n);
}

namespace {

// Potential outcome of unit i under assignment z (one bit per unit) with the
// design's coupling semantics.
double potential_outcome(const TheoryInstance& inst, DesignKind design,
                         const std::vector<int>& arm, int i) {
  const int zi = arm[i];
  const bool gated =
      design == DesignKind::data_diverted || design == DesignKind::co_diverted;
  const double corpus =
      design == DesignKind::co_diverted ? inst.corpus / 2.0 : inst.corpus;
  double y = inst.beta[zi] + inst.delta[zi] * corpus;
  for (int j = 0; j < inst.n; ++j) {
    const int zj = arm[j];
    if (gated && zi != zj) continue;
    y += inst.w_at(i, j) * inst.gamma[zi][zj];
  }
  return y;
}

}  // namespace

double brute_force_bias(const TheoryInstance& inst, DesignKind design) {
  inst.validate();
  const bool by_cluster = design == DesignKind::clustered;
  std::vector<int> unit_group(inst.n);
  int bits = 0;
  if (by_cluster) {
    require_clusters(inst);
    // Remap labels to dense bit indices.
    std::vector<int> seen;
    for (int i = 0; i < inst.n; ++i) {
      const int c = inst.clusters[i];
      auto it = std::find(seen.begin(), seen.end(), c);
      if (it == seen.end()) {
        seen.push_back(c);
        it = std::prev(seen.end());
      }
      unit_group[i] = static_cast<int>(it - seen.begin());
    }
    bits = static_cast<int>(seen.size());
  } else {
    for (int i = 0; i < inst.n; ++i) unit_group[i] = i;
    bits = inst.n;
  }
  if (bits > 20) throw std::invalid_argument("brute force capped at 20 enumeration bits");

  const double p = inst.split_prob;
  // pow_p[k] * pow_q[bits-k] = probability of an assignment with k treated bits.
  std::vector<double> pow_p(bits + 1, 1.0), pow_q(bits + 1, 1.0);
  for (int k = 1; k <= bits; ++k) {
    pow_p[k] = pow_p[k - 1] * p;
    pow_q[k] = pow_q[k - 1] * (1.0 - p);
  }

  std::vector<int> arm(inst.n, 0);
  double expectation = 0.0;
  const std::uint32_t patterns = 1u << bits;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    const int treated_bits = __builtin_popcount(mask);
    const double prob = pow_p[treated_bits] * pow_q[bits - treated_bits];
    for (int i = 0; i < inst.n; ++i) arm[i] = (mask >> unit_group[i]) & 1u;
    double treated_sum = 0.0, control_sum = 0.0;
    for (int i = 0; i < inst.n; ++i) {
      const double y = potential_outcome(inst, design, arm, i);
      if (arm[i] == 1) {
        treated_sum += y;
      } else {
        control_sum += y;
      }
    }
    const double ht = treated_sum / (inst.n * p) - control_sum / (inst.n * (1.0 - p));
    expectation += prob * ht;
  }
  return expectation - compute_tte(inst);
}

double cluster_cut_quality(const std::vector<double>& w, const std::vector<int>& clusters) {
  const int n = static_cast<int>(clusters.size());
  if (n < 1) throw std::invalid_argument("cut quality needs at least one unit");
  if (w.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("weight matrix must be n x n");
  }
  double cross = 0.0, total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double wij = w[static_cast<std::size_t>(i) * n + j];
      total += wij;
      if (clusters[i] != clusters[j]) cross += wij;
    }
  }
  return total == 0.0 ? 0.0 : cross / total;
}

double extended_cluster_bias(const ExtendedInstance& inst, bool normalize) {
  if (inst.n <= 0) throw std::invalid_argument("instance needs at least one unit");
  if (inst.w.size() != static_cast<std::size_t>(inst.n) * inst.n) {
    throw std::invalid_argument("weight matrix must be n x n");
  }
  if (inst.clusters.size() != static_cast<std::size_t>(inst.n)) {
    throw std::invalid_argument("instance lacks per-unit cluster labels");
  }
  if (inst.gamma.size() != static_cast<std::size_t>(inst.n) ||
      inst.delta.size() != static_cast<std::size_t>(inst.n)) {
    throw std::invalid_argument("per-unit gamma/delta must cover every unit");
  }
  if (inst.cluster_count() < 2) {
    throw std::invalid_argument("extended cluster bias needs at least 2 clusters");
  }
  double sum = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    const double weight = inst.gamma[i] + inst.delta[i] * (1.0 - inst.split_prob);
    for (int j = 0; j < inst.n; ++j) {
      if (inst.clusters[i] != inst.clusters[j]) sum += inst.w_at(i, j) * weight;
    }
  }
  return normalize ? sum / inst.n : sum;
}

double rmse_inflation(int n_units, int n_clusters) {
  if (n_clusters < 1) throw std::invalid_argument("cluster count must be positive");
  if (n_units < n_clusters) throw std::invalid_argument("need at least as many units as clusters");
  return std::sqrt(static_cast<double>(n_units) / n_clusters);
}

std::vector<double> fold_bipartite_graph(const std::vector<std::uint8_t>& incidence,
                                         int n_units, int n_items) {
  if (incidence.size() != static_cast<std::size_t>(n_units) * n_items) {
    throw std::invalid_argument("incidence must be n_units x n_items");
  }
  std::vector<double> w(static_cast<std::size_t>(n_units) * n_units, 0.0);
  for (int u = 0; u < n_units; ++u) {
    const std::uint8_t* ru = &incidence[static_cast<std::size_t>(u) * n_items];
    for (int v = u; v < n_units; ++v) {
      const std::uint8_t* rv = &incidence[static_cast<std::size_t>(v) * n_items];
      int shared = 0;
      for (int i = 0; i < n_items; ++i) shared += ru[i] & rv[i];
      w[static_cast<std::size_t>(u) * n_units + v] = shared;
      w[static_cast<std::size_t>(v) * n_units + u] = shared;
    }
  }
  return w;
}

}  // namespace symbiosim
