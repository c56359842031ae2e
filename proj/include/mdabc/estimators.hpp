#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "mdabc/abc.hpp"
#include "mdabc/distances.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/models.hpp"
#include "mdabc/nelder_mead.hpp"
#include "mdabc/parallel.hpp"
#include "mdabc/priors.hpp"
#include "mdabc/rng.hpp"

namespace mdabc {

// Per-coordinate weighted summary of a particle cloud: mean, population
// standard deviation, and equal-tailed 95% credible bounds read off the
// weighted ECDF by linear interpolation.
struct PosteriorSummary {
  ParameterVector mean;
  ParameterVector std;
  ParameterVector ci_low;
  ParameterVector ci_high;
};

namespace detail {

// Weighted quantile by linear interpolation between the midpoints of the
// cumulative weight steps (the weighted analogue of the type-7 rule; exact
// sample values are returned at and beyond the extreme midpoints).
inline double weighted_quantile(const std::vector<std::pair<double, double>>& sorted_vw,
                                double p) {
  const std::size_t n = sorted_vw.size();
  double cum = 0.0;
  double prev_mid = -std::numeric_limits<double>::infinity();
  double prev_val = sorted_vw.front().first;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = sorted_vw[i].second;
    const double mid = cum + 0.5 * w;
    if (p <= mid) {
      if (i == 0 || mid == prev_mid) return sorted_vw[i].first;
      const double t = (p - prev_mid) / (mid - prev_mid);
      return prev_val + t * (sorted_vw[i].first - prev_val);
    }
    cum += w;
    prev_mid = mid;
    prev_val = sorted_vw[i].first;
  }
  return sorted_vw.back().first;
}

}  // namespace detail

inline PosteriorSummary summarize(const ParticleCloud& cloud) {
  if (cloud.size() == 0) throw EmptyCloud("summarize: cloud has no particles");
  const auto w = cloud.normalized_weights();
  const std::size_t d = cloud.particles.front().theta.size();
  for (const auto& p : cloud.particles) {
    if (p.theta.size() != d) {
      throw DimensionMismatch("summarize: particles have mixed dimensions");
    }
  }

  PosteriorSummary out;
  out.mean.assign(d, 0.0);
  out.std.assign(d, 0.0);
  out.ci_low.assign(d, 0.0);
  out.ci_high.assign(d, 0.0);

  for (std::size_t j = 0; j < d; ++j) {
    // Accumulate relative to the first particle so a constant coordinate
    // yields exactly that constant (and cancellation stays small otherwise);
    // the normalized weights sum to 1 only up to rounding.
    const double anchor = cloud.particles.front().theta[j];
    double shifted = 0.0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      shifted += w[i] * (cloud.particles[i].theta[j] - anchor);
      wsum += w[i];
    }
    const double mean = anchor + shifted / wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double c = cloud.particles[i].theta[j] - mean;
      var += w[i] * c * c;
    }
    out.mean[j] = mean;
    out.std[j] = std::sqrt(std::max(0.0, var / wsum));

    std::vector<std::pair<double, double>> vw(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      vw[i] = {cloud.particles[i].theta[j], w[i]};
    }
    std::sort(vw.begin(), vw.end());
    out.ci_low[j] = detail::weighted_quantile(vw, 0.025);
    out.ci_high[j] = detail::weighted_quantile(vw, 0.975);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classical minimum-distance point estimate for the two-component normal
// mixture, whose model density and distribution function are available in
// closed form.  The smoothed-density objective convolves the model with the
// same Gaussian kernel and bandwidth as the observed-data density estimate --
// for a normal mixture that convolution is exact: each component's variance
// grows by the squared bandwidth.

struct MdEstimate {
  ParameterVector theta_hat;
  double objective_value = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t restarts_used = 0;
};

struct MdOptimizerConfig {
  std::size_t restarts = 5;
  NelderMeadConfig nelder_mead;
  unsigned threads = 1;
};

namespace detail {

inline ParameterVector mixture_kernel_widened(const ParameterVector& theta,
                                              double bandwidth) {
  return {theta[0], theta[1], std::hypot(theta[2], bandwidth),
          std::hypot(theta[3], bandwidth)};
}

// Same trapezoid sum as the sampling distance uses, with the simulated
// sample's density estimate replaced by the kernel-widened model density.
inline double mixture_hellinger_objective(const ParameterVector& theta,
                                          const DistanceContext& ctx) {
  const auto widened = mixture_kernel_widened(theta, ctx.bandwidth());
  const auto& grid = ctx.grid();
  const auto& obs = ctx.observed_density().values;
  double acc = 0.0;
  const std::size_t g = obs.size();
  for (std::size_t j = 0; j < g; ++j) {
    const double f = mixture_density(widened, grid.point(static_cast<int>(j)));
    const double fo = obs[j];
    const double diff = (fo < kDensityFloor ? 0.0 : std::sqrt(fo)) -
                        (f < kDensityFloor ? 0.0 : std::sqrt(f));
    double term = diff * diff;
    if (j == 0 || j + 1 == g) term *= 0.5;
    acc += term;
  }
  return std::sqrt(std::max(0.0, acc * grid.step()));
}

// Squared gap between the model distribution function and the observed ECDF,
// integrated against the observed empirical measure; mirrors the sample
// distance's tie-group convention.
inline double mixture_cvm_objective(const ParameterVector& theta,
                                    const DistanceContext& ctx) {
  const auto& ys = ctx.observed().sorted_values();
  const std::size_t n = ys.size();
  double acc = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t i_end = i + 1;
    while (i_end < n && ys[i_end] == ys[i]) ++i_end;
    const double fy = static_cast<double>(i_end) / static_cast<double>(n);
    const double fm = mixture_cdf(theta, ys[i]);
    acc += (fy - fm) * (fy - fm) * static_cast<double>(i_end - i);
    i = i_end;
  }
  return acc / static_cast<double>(n);
}

}  // namespace detail

// Value of the minimum-distance objective at theta for the context's
// distance family (smoothed-density or distribution-function form).
inline double md_objective(const ParameterVector& theta, const DistanceContext& ctx) {
  validate_mixture_theta(theta);
  switch (ctx.kind().family) {
    case DistanceKind::Family::hellinger:
      return detail::mixture_hellinger_objective(theta, ctx);
    case DistanceKind::Family::cvm:
      return detail::mixture_cvm_objective(theta, ctx);
    default:
      throw InvalidParameter(
          "md_objective: point estimation is defined for the smoothed-density "
          "and distribution-function distances only");
  }
}

// Stream unit claimed by the optimizer's restart draws; restart r uses
// (seed, run_id, kMdRestartUnit + r, 0).
inline constexpr std::uint64_t kMdRestartUnit = 0xEB00000000000000ull;

// Minimum-distance point estimate for the mixture model: Nelder-Mead from
// `restarts` prior-drawn starting points (streams addressed by restart index,
// so the result is reproducible for any thread count), keeping the best
// converged minimum.  If no restart converges the best point found is still
// returned with converged=false.
inline MdEstimate md_point_estimate(const ModelSpec& spec, const DistanceContext& ctx,
                                    const MdOptimizerConfig& cfg, std::uint64_t seed,
                                    std::uint64_t run_id = 0) {
  if (spec.name != ModelName::mixture) {
    throw InvalidParameter(
        "md_point_estimate: only the mixture model has a tractable density");
  }
  if (cfg.restarts == 0) {
    throw InvalidParameter("md_point_estimate: need at least one restart");
  }
  const std::size_t d = spec.prior.coords.size();
  std::vector<double> lower(d), upper(d);
  for (std::size_t j = 0; j < d; ++j) {
    lower[j] = spec.prior.coords[j].lower();
    upper[j] = spec.prior.coords[j].upper();
  }
  const auto objective = [&](const ParameterVector& theta) {
    return md_objective(theta, ctx);
  };

  // Starting points: `restarts` prior draws plus two deterministic
  // moment-matched starts that split the sample at zero -- the component
  // locations sit at +/-mu, so each half of the data moment-fits one
  // component and the two label orders give the two starts.
  std::vector<ParameterVector> starts;
  starts.reserve(cfg.restarts + 2);
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    RngStream rng(seed, run_id, kMdRestartUnit + r, 0);
    starts.push_back(prior_sample(spec.prior, rng));
  }
  {
    const auto side_moments = [](const std::vector<double>& v) {
      if (v.size() < 2) return std::pair<double, double>{0.0, 1.0};
      double m = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - m) * (x - m);
      const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
      return std::pair<double, double>{m, sd};
    };
    std::vector<double> neg, pos;
    for (double x : ctx.observed().sorted_values()) {
      (x < 0.0 ? neg : pos).push_back(x);
    }
    const auto [m_neg, s_neg] = side_moments(neg);
    const auto [m_pos, s_pos] = side_moments(pos);
    const double frac_pos =
        static_cast<double>(pos.size()) / static_cast<double>(ctx.observed_size());
    const auto clip = [](double x, double lo, double hi) {
      return std::min(std::max(x, lo), hi);
    };
    const double w_pos = clip(frac_pos, 0.02, 0.98);
    const double sd1 = clip(s_neg, 0.05, 9.95);
    const double sd2 = clip(s_pos, 0.05, 9.95);
    // Component one carries weight 1-omega at +mu: first start labels the
    // negative half as component one, the second start swaps the labels.
    starts.push_back({m_neg, w_pos, sd1, sd2});
    starts.push_back({-m_pos, 1.0 - w_pos, sd2, sd1});
  }

  std::vector<NelderMeadResult> results(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t r) {
    results[r] = nelder_mead(objective, starts[r], lower, upper, cfg.nelder_mead);
  });

  // Deterministic reduction: prefer converged results, then lower objective,
  // then lower restart index.
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    const bool better_class = results[r].converged && !results[best].converged;
    const bool same_class = results[r].converged == results[best].converged;
    if (better_class || (same_class && results[r].value < results[best].value)) {
      best = r;
    }
  }

  MdEstimate est;
  est.theta_hat = results[best].x;
  est.objective_value = results[best].value;
  est.converged = results[best].converged;
  est.restarts_used = results.size();
  return est;
}

// Copy of the cloud with every particle mapped to the model's canonical
// labeling (the mixture's two component labelings generate identical data;
// summaries are only comparable after folding).  Other models are returned
// unchanged.
inline ParticleCloud canonicalize_for_model(ParticleCloud cloud, ModelName name) {
  if (name == ModelName::mixture) {
    for (auto& p : cloud.particles) p.theta = mixture_canonical(p.theta);
  }
  return cloud;
}

// Coordinate-wise |posterior mean - point estimate|, the quantity the
// large-sample theory drives to zero; both inputs must describe the same
// parameter space.
inline ParameterVector posterior_mean_vs_md_gap(const ParticleCloud& cloud,
                                                const MdEstimate& md) {
  const auto summary = summarize(cloud);
  if (summary.mean.size() != md.theta_hat.size()) {
    throw DimensionMismatch("posterior_mean_vs_md_gap: dimension mismatch");
  }
  ParameterVector gap(summary.mean.size());
  for (std::size_t j = 0; j < gap.size(); ++j) {
    gap[j] = std::fabs(summary.mean[j] - md.theta_hat[j]);
  }
  return gap;
}

}  // namespace mdabc
