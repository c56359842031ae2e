#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mdabc/dataset.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/grid.hpp"
#include "mdabc/rng.hpp"

namespace mdabc {

// A density sampled on a uniform grid, remembering the kernel bandwidth that
// produced it.
struct SmoothedDensity {
  IntegrationGrid grid;
  std::vector<double> values;
  double bandwidth = 0.0;
};

inline double total_mass(const SmoothedDensity& d) {
  return trapezoid(d.grid, d.values);
}

namespace detail {

// Density values this small are treated as exact zeros; they sit far below
// anything the quadratures here can resolve, and cutting them keeps kernel-row
// sweeps short.
inline constexpr double kDensityFloor = 1e-300;

// Accumulates unnormalized Gaussian kernel rows exp(-(g_j - z)^2 / (2 h^2))
// over a uniform grid.  The row factorizes around the grid point nearest z:
// with u0 its offset from z, A = step^2/(2 h^2) and r = exp(-u0*step/h^2),
//
//   exp(-(u0 + k*step)^2 / (2 h^2)) = a0 * r^k * exp(-A k^2),
//
// so a full row costs two exp() calls plus two multiplies per grid cell
// (exp(-A k^2) is tabulated once per grid/bandwidth pair).  That constant
// matters: the smoothed-distance samplers evaluate billions of cells.
class GaussianRowAccumulator {
 public:
  GaussianRowAccumulator(const IntegrationGrid& grid, double bandwidth)
      : grid_(grid), h_(bandwidth) {
    if (!(std::isfinite(h_) && h_ > 0.0)) {
      throw InvalidParameter("GaussianRowAccumulator: bandwidth must be positive");
    }
    step_ = grid_.step();
    inv_two_h2_ = 1.0 / (2.0 * h_ * h_);
    a_ = step_ * step_ * inv_two_h2_;
    step_over_h2_ = step_ / (h_ * h_);
    // When the kernel is much narrower than one cell the factorized sweep can
    // overflow its power chains; a direct evaluation of the (at most a few)
    // surviving cells is both safe and cheap there.
    direct_ = a_ > 100.0;
    if (!direct_) {
      const int limit = static_cast<int>(std::ceil(std::sqrt(745.0 / a_))) + 1;
      const int kmax = std::min(grid_.size() - 1, limit);
      table_.resize(static_cast<std::size_t>(kmax) + 1);
      for (int k = 0; k <= kmax; ++k) {
        table_[static_cast<std::size_t>(k)] = std::exp(-a_ * k * k);
      }
    }
  }

  const IntegrationGrid& grid() const { return grid_; }
  double bandwidth() const { return h_; }

  // out[j] += exp(-(grid.point(j) - z)^2 / (2 h^2)) for every grid index j.
  // The caller applies the 1/(n h sqrt(2 pi)) normalization once at the end.
  // Non-finite z contributes nothing (its kernel mass lies entirely outside
  // any finite grid).
  void add_row(double z, double* out) const {
    if (!std::isfinite(z)) return;
    const int n = grid_.size();
    const double t = (z - grid_.lower()) / step_;
    int j0;
    if (t >= static_cast<double>(n - 1)) {
      j0 = n - 1;
    } else if (t > 0.0) {
      j0 = static_cast<int>(std::llround(t));
    } else {
      j0 = 0;
    }
    const double u0 = grid_.point(j0) - z;
    const double e0 = u0 * u0 * inv_two_h2_;
    if (e0 > 745.0) return;  // even the nearest cell underflows
    const double a0 = std::exp(-e0);
    if (direct_) {
      out[j0] += a0;
      for (int j = j0 + 1; j < n; ++j) {
        const double u = grid_.point(j) - z;
        const double e = u * u * inv_two_h2_;
        if (e > 745.0) break;
        out[j] += std::exp(-e);
      }
      for (int j = j0 - 1; j >= 0; --j) {
        const double u = grid_.point(j) - z;
        const double e = u * u * inv_two_h2_;
        if (e > 745.0) break;
        out[j] += std::exp(-e);
      }
      return;
    }
    out[j0] += a0;
    // Terms decay monotonically once a sweep has passed z, which happens at
    // k = 0 when the sweep moves away from z and by k = 1 otherwise (the
    // nearest-cell offset is at most half a step for interior points).
    const double rr = std::exp(-u0 * step_over_h2_);
    sweep(out, j0, +1, n - 1 - j0, a0, rr, (u0 >= 0.0) ? 0 : 1);
    sweep(out, j0, -1, j0, a0, 1.0 / rr, (u0 <= 0.0) ? 0 : 1);
  }

 private:
  // Adds a0 * r^k * table_[k] to out[j0 + dir*k] for k = 1..len.  Four
  // independent power chains keep the multiply latency off the critical path.
  void sweep(double* out, int j0, int dir, int len, double a0, double r,
             int kpeak) const {
    const int kmax = std::min(len, static_cast<int>(table_.size()) - 1);
    if (kmax < 1) return;
    const double r2 = r * r;
    const double r4 = r2 * r2;
    double p1 = a0 * r;
    double p2 = a0 * r2;
    double p3 = p1 * r2;
    double p4 = a0 * r4;
    double* o = out + j0;
    int k = 1;
    for (; k + 3 <= kmax; k += 4) {
      const double t1 = p1 * table_[static_cast<std::size_t>(k)];
      const double t2 = p2 * table_[static_cast<std::size_t>(k + 1)];
      const double t3 = p3 * table_[static_cast<std::size_t>(k + 2)];
      const double t4 = p4 * table_[static_cast<std::size_t>(k + 3)];
      o[dir * k] += t1;
      o[dir * (k + 1)] += t2;
      o[dir * (k + 2)] += t3;
      o[dir * (k + 3)] += t4;
      if (t4 < kDensityFloor && k + 3 >= kpeak) return;
      p1 *= r4;
      p2 *= r4;
      p3 *= r4;
      p4 *= r4;
    }
    double p = p1;  // equals a0 * r^k at the loop head
    for (; k <= kmax; ++k) {
      const double term = p * table_[static_cast<std::size_t>(k)];
      o[dir * k] += term;
      if (term < kDensityFloor && k >= kpeak) return;
      p *= r;
    }
  }

  IntegrationGrid grid_;
  double h_;
  double step_ = 0.0;
  double inv_two_h2_ = 0.0;
  double a_ = 0.0;
  double step_over_h2_ = 0.0;
  bool direct_ = false;
  std::vector<double> table_;
};

// Kernel density estimate without any span checking: sample mass falling
// outside the grid is silently dropped.  The smoothed-distance loop relies on
// that behaviour for simulated data, whose range the fixed observed-data grid
// cannot anticipate.
inline void kde_accumulate(const GaussianRowAccumulator& acc,
                           const std::vector<double>& data,
                           std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(acc.grid().size()), 0.0);
  for (double z : data) acc.add_row(z, out.data());
  const double scale =
      kInvSqrt2Pi / (acc.bandwidth() * static_cast<double>(data.size()));
  for (double& v : out) v *= scale;
}

}  // namespace detail

// Gaussian kernel density estimate of `data` evaluated on `grid`:
//   f(g_j) = (1/n) * sum_i phi(g_j; d_i, bandwidth^2).
// The grid must cover the data with four bandwidths of slack on each side so
// no appreciable kernel mass is lost.
inline SmoothedDensity kde_smooth(const std::vector<double>& data, double bandwidth,
                                  const IntegrationGrid& grid) {
  if (data.empty()) throw DegenerateSample("kde_smooth: empty sample");
  if (!(std::isfinite(bandwidth) && bandwidth > 0.0)) {
    throw InvalidParameter("kde_smooth: bandwidth must be positive and finite");
  }
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (grid.lower() > *lo - 4.0 * bandwidth || grid.upper() < *hi + 4.0 * bandwidth) {
    throw GridTooNarrow("kde_smooth: grid must span the data plus 4 bandwidths");
  }
  SmoothedDensity result{grid, {}, bandwidth};
  detail::GaussianRowAccumulator acc(grid, bandwidth);
  detail::kde_accumulate(acc, data, result.values);
  return result;
}

// Type-7 quantile (linear interpolation between order statistics) of an
// already-sorted sample.
inline double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DegenerateSample("quantile_type7: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("quantile_type7: p must lie in [0, 1]");
  }
  const double idx = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = idx - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Rule-of-thumb kernel bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5).  When the
// interquartile range collapses while the standard deviation does not (heavily
// tied samples), the spread estimate falls back to the standard deviation, as
// the classical rule does.
inline double silverman_bandwidth(const std::vector<double>& data) {
  const std::size_t n = data.size();
  if (n < 2) throw DegenerateSample("silverman_bandwidth: need at least 2 points");
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : data) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw DegenerateSample("silverman_bandwidth: sample has zero spread");
  }
  std::vector<double> sorted(data);
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
  double scale = std::min(sd, iqr / 1.34);
  if (!(scale > 0.0)) scale = sd;
  return 0.9 * scale * std::pow(static_cast<double>(n), -0.2);
}

// Convolution of a probability density with a Gaussian kernel of the given
// bandwidth, evaluated on the grid:
//   (f * K_h)(x) = integral of phi(s) f(x - h s) ds,
// discretized by trapezoid in the standardized kernel variable s over
// [-8.5, 8.5] (kernel tails beyond carry < 1e-15 mass).  The quadrature is
// exact in the h -> 0 limit, where the output reduces to f on the grid.
// With require_unit_mass set, a result whose grid captures less than 99% of
// the smoothed mass is rejected.
template <class DensityFn>
SmoothedDensity smooth_model_density(DensityFn&& density, double bandwidth,
                                     const IntegrationGrid& grid,
                                     bool require_unit_mass = true) {
  if (!(std::isfinite(bandwidth) && bandwidth > 0.0)) {
    throw InvalidParameter("smooth_model_density: bandwidth must be positive");
  }
  constexpr int kNodes = 257;
  constexpr double kSpan = 8.5;
  const double ds = 2.0 * kSpan / static_cast<double>(kNodes - 1);
  double node[kNodes];
  double weight[kNodes];
  for (int k = 0; k < kNodes; ++k) {
    node[k] = -kSpan + ds * static_cast<double>(k);
    weight[k] = normal_pdf(node[k]) * ds;
  }
  weight[0] *= 0.5;
  weight[kNodes - 1] *= 0.5;

  SmoothedDensity result{grid, std::vector<double>(static_cast<std::size_t>(grid.size()), 0.0),
                         bandwidth};
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.point(j);
    double sum = 0.0;
    for (int k = 0; k < kNodes; ++k) {
      sum += weight[k] * density(x - bandwidth * node[k]);
    }
    result.values[static_cast<std::size_t>(j)] = sum;
  }
  if (require_unit_mass) {
    const double mass = total_mass(result);
    if (std::fabs(mass - 1.0) > 1e-2) {
      throw GridTooNarrow("smooth_model_density: grid captures too little mass");
    }
  }
  return result;
}

}  // namespace mdabc
