#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "mdabc/dataset.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/grid.hpp"
#include "mdabc/kde.hpp"

namespace mdabc {

// Which distance between empirical measures a run uses.  The Wasserstein
// family carries its order p.
struct DistanceKind {
  enum class Family { wasserstein, cvm, hellinger };

  Family family = Family::wasserstein;
  double p = 1.0;

  static DistanceKind wasserstein(double order = 1.0) {
    return DistanceKind{Family::wasserstein, order};
  }
  static DistanceKind cvm() { return DistanceKind{Family::cvm, 1.0}; }
  static DistanceKind hellinger() { return DistanceKind{Family::hellinger, 1.0}; }
};

namespace detail {

// W_p between two sorted samples.  Equal sizes pair order statistics
// directly; unequal sizes (if permitted) couple the i-th of n reference
// order statistics with the ceil(i*m/n)-th of the m comparison ones.
inline double wasserstein_sorted(const std::vector<double>& ys,
                                 const std::vector<double>& zs, double p,
                                 bool allow_quantile_coupling) {
  const std::size_t n = ys.size();
  const std::size_t m = zs.size();
  if (n != m && !allow_quantile_coupling) {
    throw LengthMismatch("wasserstein_1d: samples differ in size and quantile coupling is off");
  }
  double acc = 0.0;
  if (n == m) {
    if (p == 1.0) {
      for (std::size_t i = 0; i < n; ++i) acc += std::fabs(ys[i] - zs[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) acc += std::pow(std::fabs(ys[i] - zs[i]), p);
    }
  } else {
    for (std::size_t i = 1; i <= n; ++i) {
      const std::size_t j = (i * m + n - 1) / n;  // ceil(i*m/n), 1-based
      acc += std::pow(std::fabs(ys[i - 1] - zs[j - 1]), p);
    }
  }
  acc /= static_cast<double>(n);
  return (p == 1.0) ? acc : std::pow(acc, 1.0 / p);
}

// Integrated squared gap between the two distribution functions, evaluated
// against the reference (first) empirical measure.  Runs over groups of tied
// reference values so each sample point contributes its right-continuous
// distribution value exactly once.
inline double cvm_sorted(const std::vector<double>& ys, const std::vector<double>& zs) {
  const std::size_t n = ys.size();
  const std::size_t m = zs.size();
  double acc = 0.0;
  std::size_t j = 0;  // count of zs <= current y value
  std::size_t i = 0;
  while (i < n) {
    std::size_t i_end = i + 1;
    while (i_end < n && ys[i_end] == ys[i]) ++i_end;
    while (j < m && zs[j] <= ys[i]) ++j;
    const double fy = static_cast<double>(i_end) / static_cast<double>(n);
    const double gz = static_cast<double>(j) / static_cast<double>(m);
    acc += (fy - gz) * (fy - gz) * static_cast<double>(i_end - i);
    i = i_end;
  }
  return acc / static_cast<double>(n);
}

}  // namespace detail

// Order-p Wasserstein distance between two univariate samples of equal size
// (one-dimensional optimal transport pairs sorted order statistics).  With
// allow_quantile_coupling, unequal sizes are matched through their quantile
// functions instead of being rejected.
inline double wasserstein_1d(const std::vector<double>& y, const std::vector<double>& z,
                             double p = 1.0, bool allow_quantile_coupling = false) {
  if (y.empty() || z.empty()) throw DegenerateSample("wasserstein_1d: empty sample");
  if (!(p >= 1.0)) throw InvalidParameter("wasserstein_1d: order p must be >= 1");
  std::vector<double> ys(y), zs(z);
  std::sort(ys.begin(), ys.end());
  std::sort(zs.begin(), zs.end());
  return detail::wasserstein_sorted(ys, zs, p, allow_quantile_coupling);
}

// Cramer-von Mises-type discrepancy: the squared gap between the reference
// distribution function of y and the comparison one of z, integrated against
// the empirical measure of y:
//   (1/n) * sum_i (F_y(y_i) - G_z(y_i))^2.
// Integrating against the reference side makes the discrepancy intentionally
// asymmetric; the reference sample always comes first.
inline double cvm_distance(const std::vector<double>& y, const std::vector<double>& z) {
  if (y.empty() || z.empty()) throw DegenerateSample("cvm_distance: empty sample");
  std::vector<double> ys(y), zs(z);
  std::sort(ys.begin(), ys.end());
  std::sort(zs.begin(), zs.end());
  return detail::cvm_sorted(ys, zs);
}

// Hellinger distance between two densities sampled on the same grid:
//   H = sqrt( integral (sqrt(f) - sqrt(g))^2 ),
// by trapezoidal quadrature.  The squared-difference integrand is exactly
// zero wherever the inputs coincide, so identical densities give exactly 0,
// and H never exceeds sqrt(2) beyond quadrature rounding.
inline double hellinger_between(const SmoothedDensity& a, const SmoothedDensity& b) {
  if (!(a.grid == b.grid)) {
    throw LengthMismatch("hellinger_between: densities live on different grids");
  }
  const std::size_t g = a.values.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < g; ++j) {
    double fa = a.values[j];
    double fb = b.values[j];
    if (fa < detail::kDensityFloor) fa = 0.0;
    if (fb < detail::kDensityFloor) fb = 0.0;
    const double d = std::sqrt(fa) - std::sqrt(fb);
    double term = d * d;
    if (j == 0 || j + 1 == g) term *= 0.5;
    acc += term;
  }
  const double h2 = acc * a.grid.step();
  return std::sqrt(std::max(0.0, h2));
}

// Options for building a DistanceContext.  A zero bandwidth requests the
// rule-of-thumb bandwidth of the observed data; the grid always spans the
// observed data plus four bandwidths of slack per side.
struct DistanceContextOptions {
  int grid_points = 512;
  double bandwidth = 0.0;
  bool allow_quantile_coupling = false;
};

// Everything about the observed sample that a simulation loop reuses across
// millions of distance evaluations: sorted order statistics, and for the
// smoothed-density distance the bandwidth, evaluation grid, kernel row table
// and square-rooted observed density.  Immutable after construction, so any
// number of threads may evaluate distances against it concurrently.
class DistanceContext {
 public:
  DistanceContext(DistanceKind kind, const Dataset& observed,
                  DistanceContextOptions options = {})
      : kind_(kind), observed_(observed) {
    if (kind_.family == DistanceKind::Family::wasserstein && !(kind_.p >= 1.0)) {
      throw InvalidParameter("DistanceContext: Wasserstein order must be >= 1");
    }
    allow_quantile_coupling_ = options.allow_quantile_coupling;
    if (kind_.family == DistanceKind::Family::hellinger) {
      bandwidth_ = options.bandwidth > 0.0 ? options.bandwidth
                                           : silverman_bandwidth(observed.values);
      grid_.emplace(observed_.min() - 4.0 * bandwidth_,
                    observed_.max() + 4.0 * bandwidth_, options.grid_points);
      accumulator_.emplace(*grid_, bandwidth_);
      observed_density_.emplace(kde_smooth(observed.values, bandwidth_, *grid_));
      sqrt_observed_.resize(observed_density_->values.size());
      for (std::size_t j = 0; j < sqrt_observed_.size(); ++j) {
        const double f = observed_density_->values[j];
        sqrt_observed_[j] = f < detail::kDensityFloor ? 0.0 : std::sqrt(f);
      }
    }
  }

  const DistanceKind& kind() const { return kind_; }
  const EmpiricalMeasure& observed() const { return observed_; }
  std::size_t observed_size() const { return observed_.size(); }
  bool allows_quantile_coupling() const { return allow_quantile_coupling_; }

  // Smoothed-family accessors; only meaningful for the hellinger family.
  double bandwidth() const { return bandwidth_; }
  const IntegrationGrid& grid() const { return *grid_; }
  const SmoothedDensity& observed_density() const { return *observed_density_; }

  double evaluate(const std::vector<double>& simulated) const {
    if (simulated.empty()) throw DegenerateSample("distance: empty simulated sample");
    // Simulators can emit non-finite paths under extreme parameters.  NaN has
    // no place in an ordering (and would corrupt a sort), so such draws rank
    // after every finite distance instead of poisoning thresholds.
    for (double v : simulated) {
      if (std::isnan(v)) return std::numeric_limits<double>::infinity();
    }
    double d = 0.0;
    switch (kind_.family) {
      case DistanceKind::Family::wasserstein: {
        std::vector<double> zs(simulated);
        std::sort(zs.begin(), zs.end());
        d = detail::wasserstein_sorted(observed_.sorted_values(), zs, kind_.p,
                                       allow_quantile_coupling_);
        break;
      }
      case DistanceKind::Family::cvm: {
        std::vector<double> zs(simulated);
        std::sort(zs.begin(), zs.end());
        d = detail::cvm_sorted(observed_.sorted_values(), zs);
        break;
      }
      case DistanceKind::Family::hellinger: {
        std::vector<double> fz;
        detail::kde_accumulate(*accumulator_, simulated, fz);
        double acc = 0.0;
        const std::size_t g = fz.size();
        for (std::size_t j = 0; j < g; ++j) {
          const double f = fz[j];
          const double diff =
              sqrt_observed_[j] - (f < detail::kDensityFloor ? 0.0 : std::sqrt(f));
          double term = diff * diff;
          if (j == 0 || j + 1 == g) term *= 0.5;
          acc += term;
        }
        d = std::sqrt(std::max(0.0, acc * grid_->step()));
        break;
      }
    }
    return std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
  }

 private:
  DistanceKind kind_;
  EmpiricalMeasure observed_;
  bool allow_quantile_coupling_ = false;
  double bandwidth_ = 0.0;
  std::optional<IntegrationGrid> grid_;
  std::optional<detail::GaussianRowAccumulator> accumulator_;
  std::optional<SmoothedDensity> observed_density_;
  std::vector<double> sqrt_observed_;
};

// Distance between the context's observed sample and a simulated one.
inline double distance(const DistanceContext& ctx, const std::vector<double>& simulated) {
  return ctx.evaluate(simulated);
}

inline double distance(const DistanceContext& ctx, const Dataset& simulated) {
  return ctx.evaluate(simulated.values);
}

}  // namespace mdabc
