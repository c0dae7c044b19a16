#pragma once

#include <cstdint>
#include <random>

namespace kwgroup {

/// Standard normal CDF, accurate to full double precision via erfc.
double normal_cdf(double x);

/// Inverse standard normal CDF on (0, 1).
///
/// Rational initial guess refined with one Halley step on the CDF;
/// absolute error is below 1e-12 across the open interval.
/// Throws std::domain_error for p outside (0, 1).
double normal_quantile(double p);

/// Mixes two 64-bit values into a new seed (splitmix64 finalizer).
/// Used to derive independent, reproducible RNG streams from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

/// Deterministic RNG wrapper.
///
/// All sampling goes through this class rather than the std distribution
/// objects so that streams are identical across standard library
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform draw in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform draw in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw (Marsaglia polar method, spare value cached).
  double standard_normal();

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kwgroup
