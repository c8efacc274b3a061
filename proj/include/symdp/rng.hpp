/// @file  rng.hpp
/// @brief Seedable deterministic random stream shared by the simulator,
///        the problem generator, and the exploration policies.

#pragma once

#include <cstdint>
#include <random>

namespace symdp {

/// Thin wrapper over mt19937_64 with hand-rolled draws, so identical seeds
/// give identical trajectories on every platform (the std distributions are
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform in [0,1) with 53 random bits.
  double unit() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, bound); bound must be positive.
  std::uint32_t below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(raw() % bound);
  }

  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace symdp
