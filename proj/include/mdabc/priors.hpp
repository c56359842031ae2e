#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mdabc/errors.hpp"
#include "mdabc/rng.hpp"

namespace mdabc {

using ParameterVector = std::vector<double>;

// One prior coordinate: uniform on [lo, hi] or normal(mean, sd).
struct CoordinatePrior {
  enum class Kind { uniform, normal };

  Kind kind = Kind::uniform;
  double a = 0.0;  // lower bound, or mean
  double b = 1.0;  // upper bound, or standard deviation
  std::string name;

  static CoordinatePrior uniform(double lo, double hi, std::string label) {
    if (!(lo < hi)) throw InvalidParameter("uniform prior needs lo < hi");
    return {Kind::uniform, lo, hi, std::move(label)};
  }
  static CoordinatePrior normal(double mean, double sd, std::string label) {
    if (!(sd > 0.0)) throw InvalidParameter("normal prior needs sd > 0");
    return {Kind::normal, mean, sd, std::move(label)};
  }

  // Finite box the coordinate is allowed to live in (infinite for normal);
  // optimizers and proposal logic use this for reflection and clipping.
  double lower() const {
    return kind == Kind::uniform ? a : -std::numeric_limits<double>::infinity();
  }
  double upper() const {
    return kind == Kind::uniform ? b : std::numeric_limits<double>::infinity();
  }
};

// Product prior over the parameter vector. When `second_is_increment` is set
// the coordinate-1 prior applies to the increment theta[1] - theta[0] (the
// queueing model's service-window width); sampling adds theta[0] back and the
// density is evaluated at the increment, a unit-Jacobian shift.
struct PriorSpec {
  std::vector<CoordinatePrior> coords;
  bool second_is_increment = false;

  std::size_t dimension() const { return coords.size(); }
};

inline double coordinate_sample(const CoordinatePrior& c, RngStream& rng) {
  // Open-interval draws keep boundary values (zero scales, unit weights) out
  // of simulator preconditions at no distributional cost.
  if (c.kind == CoordinatePrior::Kind::uniform) {
    return c.a + (c.b - c.a) * rng.uniform_open();
  }
  return rng.normal(c.a, c.b);
}

inline double coordinate_logdensity(const CoordinatePrior& c, double x) {
  if (!std::isfinite(x)) return -std::numeric_limits<double>::infinity();
  if (c.kind == CoordinatePrior::Kind::uniform) {
    if (x < c.a || x > c.b) return -std::numeric_limits<double>::infinity();
    return -std::log(c.b - c.a);
  }
  const double z = (x - c.a) / c.b;
  return -0.5 * z * z - std::log(c.b) - 0.5 * std::log(2.0 * 3.141592653589793238462643383279502884);
}

inline ParameterVector prior_sample(const PriorSpec& p, RngStream& rng) {
  if (p.coords.empty()) throw InvalidParameter("prior has no coordinates");
  ParameterVector theta(p.coords.size());
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    theta[i] = coordinate_sample(p.coords[i], rng);
  }
  if (p.second_is_increment) {
    if (theta.size() < 2) throw InvalidParameter("increment prior needs >= 2 coordinates");
    theta[1] += theta[0];
  }
  return theta;
}

inline double prior_logdensity(const PriorSpec& p, const ParameterVector& theta) {
  if (theta.size() != p.coords.size()) {
    throw DimensionMismatch("parameter dimension does not match prior");
  }
  if (p.second_is_increment && theta.size() < 2) {
    throw InvalidParameter("increment prior needs >= 2 coordinates");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    const double x =
        (p.second_is_increment && i == 1) ? theta[1] - theta[0] : theta[i];
    acc += coordinate_logdensity(p.coords[i], x);
    if (!std::isfinite(acc)) return -std::numeric_limits<double>::infinity();
  }
  return acc;
}

inline bool prior_supports(const PriorSpec& p, const ParameterVector& theta) {
  return std::isfinite(prior_logdensity(p, theta));
}

}  // namespace mdabc
