#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic randomness. std::mt19937_64 itself is bit-portable, but the
// std::*_distribution adapters are implementation-defined, so every transform
// here is hand-rolled. Artifacts produced with a given seed are identical
// across platforms, compilers and thread counts.

namespace satrrm {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed for the i-th sample of a run: master xor index, then mixed so that
// neighbouring indices land far apart in engine state space.
inline constexpr std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index,
                                           std::uint64_t salt = 0) {
  return splitmix64(master ^ index ^ salt);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; the second deviate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Multiplicative noise factor with mean exactly 1: exp(sigma*z - sigma^2/2).
  double lognormal_unit_mean(double sigma) {
    return std::exp(sigma * normal() - 0.5 * sigma * sigma);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n). Modulo bias is < n/2^64, irrelevant for our n.
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

  template <class T>
  void shuffle(std::vector<T>& v) {  // Fisher-Yates, back to front
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace satrrm
