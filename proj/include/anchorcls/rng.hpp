#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

#include "anchorcls/errors.hpp"

namespace anchorcls {

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Derives a child seed from a master seed and a stage label
/// (e.g. "episode/r0/t3"). Used everywhere a stage needs its own stream,
/// so partial reruns stay consistent with full runs.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return splitmix64(splitmix64(master) ^ fnv1a64(label));
}

/// Deterministic random source. Wraps std::mt19937_64 (fully specified by
/// the standard) and implements its own bounded/real draws, since the
/// std::uniform_* distributions are not guaranteed to be identical across
/// standard library implementations.
class Rng {
 public:
  /// Identifier recorded in manifests; bump when any draw algorithm changes.
  static constexpr const char* kName = "mt19937_64/anchorcls-draws-v1";

  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Unbiased draw in [0, bound) via rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw Error("Rng::below: bound must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t r = gen_();
    while (r >= limit) r = gen_();
    return r % bound;
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices drawn without replacement from [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    if (k > n) throw Error("Rng::sample_indices: k exceeds population size");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

  /// Index drawn from an explicit probability vector (assumed to sum to ~1).
  std::size_t weighted_index(const std::vector<double>& probs) {
    if (probs.empty()) throw Error("Rng::weighted_index: empty distribution");
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;  // numerical slack: u landed past the cumulative sum
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace anchorcls
