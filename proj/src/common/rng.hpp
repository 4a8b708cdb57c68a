#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fusiondrive {

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr uint64_t mix_seed(uint64_t a, uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ULL));
}

template <typename... Rest>
constexpr uint64_t mix_seed(uint64_t a, uint64_t b, Rest... rest) {
  return mix_seed(mix_seed(a, b), static_cast<uint64_t>(rest)...);
}

/// Seeded generator with distribution code spelled out here, so sequences do
/// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(splitmix64(seed)) {}

  uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return lo + static_cast<int64_t>(r % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
};

/// Stateless hash to [0, 1), used for world-space textures.
inline double hash_unit(uint64_t a, uint64_t b, uint64_t c = 0) {
  return static_cast<double>(mix_seed(a, b, c) >> 11) * 0x1.0p-53;
}

}  // namespace fusiondrive
