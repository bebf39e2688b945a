#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace symbiosim {

// SplitMix64 finalizer. Used to derive independent stream seeds from a base
// seed; also usable as a cheap stateless hash.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed derivation policy, applied everywhere a run needs more than one
// stream:
//   population stream of replication r : base_seed ^ r          (verbatim)
//   assignment stream of replication r : mix(base_seed ^ r, kAssignmentSalt)
//   runtime stream of replication r    : mix(base_seed ^ r, kRuntimeSalt)
//   counterfactual base seed           : mix(base_seed, kTruthSalt)
// where mix(x, salt) = splitmix64(x ^ salt).
inline constexpr std::uint64_t kAssignmentSalt = 0x41535349474e3031ULL;
inline constexpr std::uint64_t kRuntimeSalt = 0x52554e54494d4531ULL;
inline constexpr std::uint64_t kTruthSalt = 0x545255544854424cULL;

inline std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(base ^ salt);
}

// Deterministic random stream: a seeded mt19937_64 engine with hand-rolled
// distribution transforms so the produced sequences do not depend on the
// standard library's unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); rejects the single zero value.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). Lemire multiply-reject.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (no spare caching, keeps the stream's
  // draw count a pure function of the call sequence).
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 handled with the
  // usual boost trick.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Beta(a, b) as a gamma ratio. Retries the (astronomically rare) case of
  // both gammas underflowing to zero.
  double beta(double a, double b) {
    for (;;) {
      const double x = gamma(a);
      const double y = gamma(b);
      if (x + y > 0.0) return x / (x + y);
    }
  }

  // Dirichlet draw, written into `out` (same length as `alphas`).
  void dirichlet(const std::vector<double>& alphas, std::vector<double>& out) {
    out.resize(alphas.size());
    for (;;) {
      double sum = 0.0;
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        out[i] = gamma(alphas[i]);
        sum += out[i];
      }
      if (sum > 0.0) {
        for (double& v : out) v /= sum;
        return;
      }
    }
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  std::mt19937_64 engine_;
};

}  // namespace symbiosim
