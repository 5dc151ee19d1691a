#pragma once

#include <cstdint>

namespace qmetro {

/// Splittable seeded stream (SplitMix64 core). Passed by value everywhere;
/// there is no global RNG. substream(i) derives an independent stream from
/// (state, i), which is what makes Monte Carlo loops reproducible regardless
/// of how reps are partitioned across workers.
///
/// std::random distributions are avoided on purpose: their outputs are
/// implementation-defined, and reports must be byte-stable for a given seed.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(mix(seed ^ 0x9E3779B97F4A7C15ull)) {}

  Prng substream(std::uint64_t index) const {
    return Prng(mix(state_ + 0xBF58476D1CE4E5B9ull * (index + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double next_gaussian();

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

/// Binomial(n, p) draw by inversion: one uniform is mapped through the pmf
/// accumulated outward from the mode, so big n costs O(sqrt(n p (1-p)))
/// expected steps and the result depends only on the stream position.
std::uint64_t binomial_sample(Prng& rng, std::uint64_t n, double p);

}  // namespace qmetro
