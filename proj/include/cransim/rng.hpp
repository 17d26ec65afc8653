#pragma once

// SplitMix64: a small, fast, seedable, splittable generator.
//
// Stream-derivation rule (the determinism contract of the Monte Carlo code):
// the generator for sub-stream k of a root seed s is seeded with
//
//     mix64(mix64(s) + (k + 1) * 0x9e3779b97f4a7c15)
//
// where mix64 is the SplitMix64 output permutation (a bijection on 64-bit
// words).  Sub-streams depend only on (s, k) -- never on how many draws the
// parent has produced -- so per-trial streams give results that are
// independent of evaluation order.

#include <cstdint>
#include <cmath>

namespace cransim {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Exponential with the given mean; uses 1-u so the argument of log stays
  // in (0, 1].
  double next_exponential(double mean) {
    return -mean * std::log(1.0 - next_double());
  }

  // Child stream k, derived from the original seed per the rule above.
  SplitMix64 stream(std::uint64_t k) const {
    return SplitMix64(derive_seed(seed_, k));
  }

  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    return mix64(mix64(seed) + (k + 1) * kGolden);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace cransim
