#ifndef HARNACK_RNG_HPP
#define HARNACK_RNG_HPP

// Reproducible random streams. Every trial owns an engine seeded from
// (seed, stream, substream), so Monte Carlo results do not depend on thread
// scheduling. Variates are derived from raw 64-bit output by hand rather
// than through <random> distributions, whose algorithms are
// implementation-defined.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace harnack {

class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(substream),
                      static_cast<std::uint32_t>(substream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Uniform integer in [0, n), n > 0 (rejection sampling, no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    while (true) {
      const std::uint64_t r = engine_();
      if (r >= limit) return r % n;
    }
  }

  /// Exponential with the given rate.
  double exponential(double rate = 1.0) { return -std::log(uniform_open0()) / rate; }

private:
  std::mt19937_64 engine_;
};

/// Binomial proportion with normal standard error and 95% Wilson interval.
struct ProportionEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
};

inline ProportionEstimate estimate_proportion(std::uint64_t successes, std::uint64_t trials,
                                              double z = 1.959963984540054) {
  ProportionEstimate e;
  e.successes = successes;
  e.trials = trials;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  e.estimate = p;
  e.std_error = std::sqrt(p * (1.0 - p) / n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  e.wilson_low = std::max(0.0, centre - half);
  e.wilson_high = std::min(1.0, centre + half);
  return e;
}

} // namespace harnack

#endif
