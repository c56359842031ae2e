#pragma once

#include <cmath>
#include <cstdint>

#include "mdabc/errors.hpp"

namespace mdabc {

// MurmurHash3 64-bit finalizer: a bijective mix with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Collapses a stream address (master_seed, replication, unit, step) into one
// 64-bit key.  Distinct round constants keep permutations of the same
// components from colliding.
constexpr std::uint64_t derive_stream_key(std::uint64_t master_seed,
                                          std::uint64_t replication,
                                          std::uint64_t unit,
                                          std::uint64_t step) {
  std::uint64_t h = mix64(master_seed ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ (replication + 0x13198a2e03707344ULL));
  h = mix64(h ^ (unit + 0xa4093822299f31d0ULL));
  h = mix64(h ^ (step + 0x082efa98ec4e6c89ULL));
  return h;
}

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double normal_pdf(double x, double mean, double sd) {
  return normal_pdf((x - mean) / sd) / sd;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865476);  // x / sqrt(2)
}

// Inverse of the standard normal distribution function (Wichura's PPND16
// rational approximations; absolute error near 1e-15 over (0, 1)).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidParameter("inverse_normal_cdf: p must lie strictly inside (0, 1)");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

// Deterministic pseudo-random stream addressed by
// (master_seed, replication, unit, step).  Equal addresses reproduce the same
// sequence no matter how work is scheduled across threads, which is what makes
// every sampler in this library bitwise reproducible under parallel execution.
// The generator is splitmix64: a counter advanced by an odd constant whose
// output is finalized with a strong bijective mix.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t replication = 0,
                     std::uint64_t unit = 0, std::uint64_t step = 0)
      : state_(derive_stream_key(master_seed, replication, unit, step)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on the open interval (0, 1); safe under log() and quantile maps.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse-distribution-function map: exactly one
  // 64-bit draw per variate, so sequences stay easy to reason about.
  double normal() { return inverse_normal_cdf(uniform_open()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::uint64_t state_;
};

}  // namespace mdabc
