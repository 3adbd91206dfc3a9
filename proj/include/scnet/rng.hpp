#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace scnet {

// splitmix64: tiny, fast, and identical output on every platform.  Monte
// Carlo runs key their substreams off (base_seed, point, run), so draws must
// not depend on std::<distribution> implementation details.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unit-mean exponential
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic substream seed for (base, a, b), e.g. (seed, point, run).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) {
  std::uint64_t s = mix64(base + 0x9e3779b97f4a7c15ULL);
  s = mix64(s ^ (a + 0xbf58476d1ce4e5b9ULL));
  s = mix64(s ^ (b + 0x94d049bb133111ebULL));
  return s;
}

// Uniform sample from {v >= 0, sum(v) <= budget}: d+1 exponentials
// normalized to the budget give a Dirichlet(1,...,1) point on the extended
// simplex; dropping the last coordinate is uniform over the solid body.
inline Eigen::VectorXd sample_feasible(int dim, double budget, SplitMix64& rng) {
  Eigen::VectorXd v(dim);
  double total = 0.0;
  for (int i = 0; i < dim; ++i) {
    v[i] = rng.exponential();
    total += v[i];
  }
  total += rng.exponential();
  if (total <= 0.0) return Eigen::VectorXd::Zero(dim);
  return v * (budget / total);
}

}  // namespace scnet
