#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "mdabc/errors.hpp"

namespace mdabc {

struct NelderMeadConfig {
  int max_iterations = 500;
  double tolerance = 1e-6;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

namespace detail {

// Folds a coordinate into [lo, hi] by repeated reflection at the interval
// ends (a triangle wave), so the simplex can roam an unconstrained space
// while the objective only ever sees in-box points.  One-sided and unbounded
// intervals reflect at the finite end or pass through unchanged.
inline double reflect_into(double x, double lo, double hi) {
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (!has_lo && !has_hi) return x;
  if (has_lo && !has_hi) return lo + std::fabs(x - lo);
  if (!has_lo && has_hi) return hi - std::fabs(hi - x);
  if (x >= lo && x <= hi) return x;
  const double width = hi - lo;
  double t = std::fmod(x - lo, 2.0 * width);
  if (t < 0.0) t += 2.0 * width;
  return lo + (t <= width ? t : 2.0 * width - t);
}

inline std::vector<double> reflect_into_box(const std::vector<double>& x,
                                            const std::vector<double>& lower,
                                            const std::vector<double>& upper) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = reflect_into(x[j], lower[j], upper[j]);
  }
  return out;
}

}  // namespace detail

// Derivative-free simplex minimization (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2) with box handling by reflection at the
// bounds.  Fully deterministic: ordering ties break on the lower vertex
// index, so a fixed start yields a bitwise-identical trajectory.
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& start,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper,
                             NelderMeadConfig cfg = {}) {
  const std::size_t d = start.size();
  if (d == 0) throw InvalidParameter("nelder_mead: empty start point");
  if (lower.size() != d || upper.size() != d) {
    throw DimensionMismatch("nelder_mead: bounds do not match the start point");
  }
  if (!(cfg.max_iterations > 0) || !(cfg.tolerance > 0.0)) {
    throw InvalidParameter("nelder_mead: iterations and tolerance must be positive");
  }

  const auto eval = [&](const std::vector<double>& x) {
    const double v = f(detail::reflect_into_box(x, lower, upper));
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  // Initial simplex: the start plus one vertex per coordinate, stepped by a
  // fraction of the box width (or of the coordinate's own scale when the box
  // is unbounded).
  std::vector<std::vector<double>> vertex(d + 1, start);
  for (std::size_t j = 0; j < d; ++j) {
    double step;
    if (std::isfinite(lower[j]) && std::isfinite(upper[j])) {
      step = 0.1 * (upper[j] - lower[j]);
    } else {
      step = 0.25 * std::max(1.0, std::fabs(start[j]));
    }
    vertex[j + 1][j] += step;
  }
  std::vector<double> value(d + 1);
  for (std::size_t i = 0; i <= d; ++i) value[i] = eval(vertex[i]);

  std::vector<std::size_t> order(d + 1);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto sort_simplex = [&] {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return value[a] < value[b];
    });
  };

  NelderMeadResult result;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    sort_simplex();
    const std::size_t best = order[0];
    const std::size_t worst = order[d];
    const std::size_t second_worst = order[d - 1];

    const double spread = value[worst] - value[best];
    if (spread <= cfg.tolerance * (1.0 + std::fabs(value[best]))) {
      double diameter = 0.0;
      double scale = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double lo = vertex[0][j], hi = vertex[0][j];
        for (std::size_t i = 1; i <= d; ++i) {
          lo = std::min(lo, vertex[i][j]);
          hi = std::max(hi, vertex[i][j]);
        }
        diameter = std::max(diameter, hi - lo);
        scale = std::max(scale, std::fabs(vertex[best][j]));
      }
      if (diameter <= cfg.tolerance * (1.0 + scale)) {
        result.converged = true;
        break;
      }
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += vertex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(d);

    const auto blend = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j) {
        x[j] = centroid[j] + t * (vertex[worst][j] - centroid[j]);
      }
      return x;
    };

    const auto reflected = blend(-1.0);
    const double fr = eval(reflected);
    if (fr < value[best]) {
      const auto expanded = blend(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        vertex[worst] = expanded;
        value[worst] = fe;
      } else {
        vertex[worst] = reflected;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    if (fr < value[worst]) {
      const auto outside = blend(-0.5);
      const double fo = eval(outside);
      if (fo <= fr) {
        vertex[worst] = outside;
        value[worst] = fo;
        continue;
      }
    } else {
      const auto inside = blend(0.5);
      const double fi = eval(inside);
      if (fi < value[worst]) {
        vertex[worst] = inside;
        value[worst] = fi;
        continue;
      }
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < d; ++j) {
        vertex[i][j] = vertex[best][j] + 0.5 * (vertex[i][j] - vertex[best][j]);
      }
      value[i] = eval(vertex[i]);
    }
  }

  sort_simplex();
  result.x = detail::reflect_into_box(vertex[order[0]], lower, upper);
  result.value = value[order[0]];
  result.iterations = it;
  return result;
}

}  // namespace mdabc
