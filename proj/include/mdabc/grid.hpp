#pragma once

#include <cmath>
#include <vector>

#include "mdabc/errors.hpp"

namespace mdabc {

// Uniform evaluation grid for density work.  A floor of 64 points keeps the
// trapezoidal quadrature used elsewhere honest at the scales handled here.
class IntegrationGrid {
 public:
  IntegrationGrid(double lower, double upper, int num_points)
      : lower_(lower), upper_(upper), num_points_(num_points) {
    if (!(std::isfinite(lower) && std::isfinite(upper)) || !(lower < upper)) {
      throw InvalidParameter("IntegrationGrid: bounds must be finite with lower < upper");
    }
    if (num_points < 64) {
      throw InvalidParameter("IntegrationGrid: at least 64 points required");
    }
    step_ = (upper_ - lower_) / static_cast<double>(num_points_ - 1);
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  int size() const { return num_points_; }
  double step() const { return step_; }
  double point(int j) const { return lower_ + step_ * static_cast<double>(j); }

  std::vector<double> points() const {
    std::vector<double> p(static_cast<std::size_t>(num_points_));
    for (int j = 0; j < num_points_; ++j) p[static_cast<std::size_t>(j)] = point(j);
    return p;
  }

  bool operator==(const IntegrationGrid& o) const {
    return lower_ == o.lower_ && upper_ == o.upper_ && num_points_ == o.num_points_;
  }

 private:
  double lower_;
  double upper_;
  int num_points_;
  double step_;
};

// Trapezoidal quadrature of grid-sampled values.
inline double trapezoid(const IntegrationGrid& grid, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != grid.size()) {
    throw LengthMismatch("trapezoid: values must match the grid size");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  sum -= 0.5 * (values.front() + values.back());
  return sum * grid.step();
}

}  // namespace mdabc
