#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dmc {

/// Counter-based random stream keyed by (seed, key).
///
/// Draw k of a stream is a pure function of (seed, key, k), so chunks of a
/// Monte Carlo run can be generated in any order and on any number of
/// workers with bit-identical results. Satisfies UniformRandomBitGenerator.
class CounterStream {
public:
  using result_type = std::uint64_t;

  CounterStream(std::uint64_t seed, std::uint64_t key)
      : base_(mix(mix(seed ^ 0x5851F42D4C957F2DULL) + key * kGolden)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    ++counter_;
    return mix(base_ + counter_ * kGolden);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; consumes exactly two draws.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t poisson(double mean) {
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(*this);
  }

  std::uint64_t draws() const { return counter_; }

private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace dmc
