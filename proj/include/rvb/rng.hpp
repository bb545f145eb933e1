#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rvb {

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Sub-seed k of a master seed: splitmix64(master + k * golden ratio).
/// Stream 0 drives the chain itself; chains fanned out by the CLI use
/// streams 1, 2, ...
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + stream * 0x9E3779B97F4A7C15ull);
}

/// mt19937_64 with distribution mappings written out here so that streams
/// are identical across standard libraries.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/splitmix64-seed/v1";

  explicit Rng(std::uint64_t seed) : engine_(derive_seed(seed, 0)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n) by rejection from the top bits.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool coin() { return (engine_() >> 63) != 0; }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rvb
