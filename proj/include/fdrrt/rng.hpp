#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fdrrt {

/// Seeded random source. All randomness in the library flows through this
/// class so that a (seed -> draw sequence) mapping is stable run-to-run.
class RandomEngine {
 public:
  explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). Unbiased via rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  /// Gaussian via Box-Muller (stateful spare, deterministic).
  double normal(double mean, double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mean + stddev * mag * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; used to derive per-run seeds from a master seed:
/// seed_k = mix_seed(master, k).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t z = (master ^ k) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fdrrt
