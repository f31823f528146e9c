#pragma once

#include <cstdint>

namespace consensim {

/// Deterministic 64-bit random stream (splitmix64). The output sequence is
/// fully specified by the seed, independent of platform or standard library,
/// so traces and batch outputs are reproducible bit for bit.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint32_t next_below(std::uint32_t bound) {
    const std::uint64_t limit = ~0ull - ~0ull % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::uint32_t>(x % bound);
  }

  bool bernoulli(double p) { return next_double() < p; }

private:
  std::uint64_t state_;
};

/// Replication seed derivation: the splitmix64 finalizer applied to
/// master + (index+1) * 0x9E3779B97F4A7C15. Fixed for all time; batch
/// replication i always runs on mix_seed(master_seed, i).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace consensim
