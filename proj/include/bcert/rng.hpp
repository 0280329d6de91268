#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace bcert {

// Deterministic RNG utilities. We avoid std::*_distribution on purpose:
// their output is implementation-defined, and the CLI promises byte-identical
// results for identical seeds.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(splitmix64(seed ^ 0xabcd1234dcba4321ULL)) {
    if (s_ == 0) s_ = 0x106689d45497fdb5ULL;
  }

  std::uint64_t next_u64() {
    // xorshift64* — tiny, fast, and fully specified here.
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545f4914f6cdd1dULL;
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1] — safe as a log() argument.
  double next_double_open0() { return 1.0 - next_double(); }

  // Index sampled proportionally to `weights` (nonnegative, not all zero) by
  // a CDF walk; the last positive-weight index absorbs rounding slack.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
      if (weights[i] > 0.0) last_positive = i;
      acc += weights[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

  // Uniform point on the probability simplex (flat Dirichlet) via
  // normalized exponentials.
  std::vector<double> dirichlet(int n) {
    std::vector<double> x(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = -std::log(next_double_open0());
      total += x[i];
    }
    for (int i = 0; i < n; ++i) x[i] /= total;
    return x;
  }

 private:
  std::uint64_t s_;
};

}  // namespace bcert
