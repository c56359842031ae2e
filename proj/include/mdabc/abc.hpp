#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mdabc/dataset.hpp"
#include "mdabc/distances.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/models.hpp"
#include "mdabc/parallel.hpp"
#include "mdabc/priors.hpp"
#include "mdabc/rng.hpp"

namespace mdabc {

struct Particle {
  ParameterVector theta;
  double distance = std::numeric_limits<double>::infinity();
  double log_weight = 0.0;
};

struct ParticleCloud {
  std::vector<Particle> particles;
  double epsilon = std::numeric_limits<double>::infinity();
  std::size_t total_simulations = 0;
  double ess = 0.0;
  std::vector<double> epsilon_trace;

  std::size_t size() const { return particles.size(); }

  // Weights on the simplex, computed max-shifted from the stored logs.
  std::vector<double> normalized_weights() const {
    if (particles.empty()) throw EmptyCloud("cloud has no particles");
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& p : particles) top = std::max(top, p.log_weight);
    if (!std::isfinite(top)) throw EmptyCloud("cloud carries no weight");
    std::vector<double> w(particles.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < particles.size(); ++i) {
      w[i] = std::exp(particles[i].log_weight - top);
      sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
  }
};

inline double effective_sample_size(const ParticleCloud& cloud) {
  const auto w = cloud.normalized_weights();
  double acc = 0.0;
  for (double v : w) acc += v * v;
  return 1.0 / acc;
}

struct SmcConfig {
  std::size_t n_particles = 1024;
  std::size_t sim_budget = 0;
  double alpha_quantile = 0.5;
  double ess_threshold_fraction = 0.5;
  std::size_t move_steps = 1;
  double rw_scale = 2.0;
};

inline void validate(const SmcConfig& cfg) {
  if (cfg.n_particles < 2) throw InvalidParameter("need at least two particles");
  if (cfg.sim_budget < cfg.n_particles) {
    throw InvalidParameter("simulation budget cannot cover initialization");
  }
  if (!(cfg.alpha_quantile > 0.0 && cfg.alpha_quantile < 1.0)) {
    throw InvalidParameter("tolerance quantile must lie in (0, 1)");
  }
  if (!(cfg.ess_threshold_fraction >= 0.0 && cfg.ess_threshold_fraction <= 1.0)) {
    throw InvalidParameter("resampling threshold must lie in [0, 1]");
  }
  if (!(cfg.rw_scale > 0.0)) throw InvalidParameter("proposal scale must be positive");
}

// Seeding and threading for one sampler invocation. run_id separates
// replications and methods sharing a master seed; every random decision is
// addressed by (seed, run_id, unit, step), so results are independent of the
// thread count.
struct SamplerRun {
  std::uint64_t seed = 1;
  std::uint64_t run_id = 0;
  unsigned threads = 1;
};

namespace detail {

constexpr std::uint64_t kResampleUnit = 0x8000000000000000ull;

// Nearest-rank alpha-quantile of the given distances with infinities ordered
// last. Falls back to the largest finite value when the rank lands in the
// infinite block, so one round of thresholding always yields a usable
// tolerance; returns +inf only when no distance is finite.
inline double distance_quantile(std::vector<double> distances, double alpha) {
  std::sort(distances.begin(), distances.end());
  const std::size_t m = distances.size();
  const std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(m))));
  const double at_rank = distances[std::min(k, m) - 1];
  if (std::isfinite(at_rank)) return at_rank;
  double best = -std::numeric_limits<double>::infinity();
  for (double d : distances) {
    if (std::isfinite(d)) best = std::max(best, d);
  }
  return std::isfinite(best) ? best : std::numeric_limits<double>::infinity();
}

// Extra model-structure constraint on top of the prior: parameters the
// simulator could never reconcile with the observed data are infinitely
// distant and are never simulated.
inline bool structurally_feasible(const ModelSpec& spec, const ParameterVector& theta,
                                  double observed_min) {
  if (spec.name == ModelName::mg1) return mg1_location_feasible(theta, observed_min);
  return true;
}

inline std::vector<double> weighted_mean(const std::vector<Particle>& particles,
                                         const std::vector<double>& w) {
  const std::size_t d = particles.front().theta.size();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += w[i] * particles[i].theta[j];
  }
  return mean;
}

// Population-weighted covariance, row-major d x d.
inline std::vector<double> weighted_covariance(const std::vector<Particle>& particles,
                                               const std::vector<double>& w) {
  const std::size_t d = particles.front().theta.size();
  const auto mean = weighted_mean(particles, w);
  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    for (std::size_t r = 0; r < d; ++r) {
      const double dr = particles[i].theta[r] - mean[r];
      for (std::size_t c = 0; c <= r; ++c) {
        cov[r * d + c] += w[i] * dr * (particles[i].theta[c] - mean[c]);
      }
    }
  }
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r + 1; c < d; ++c) cov[r * d + c] = cov[c * d + r];
  }
  return cov;
}

// Lower-triangular Cholesky factor; empty on failure.
inline std::vector<double> cholesky(std::vector<double> a, std::size_t d) {
  std::vector<double> l(d * d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      double acc = a[r * d + c];
      for (std::size_t k = 0; k < c; ++k) acc -= l[r * d + k] * l[c * d + k];
      if (r == c) {
        if (!(acc > 0.0)) return {};
        l[r * d + r] = std::sqrt(acc);
      } else {
        l[r * d + c] = acc / l[c * d + c];
      }
    }
  }
  return l;
}

// Factor of rw_scale x weighted covariance for random-walk proposals, with a
// diagonal ridge (and in the worst case a diagonal-only factor) so a
// degenerate cloud still yields usable, deterministic proposals.
inline std::vector<double> proposal_factor(const std::vector<Particle>& particles,
                                           const std::vector<double>& w,
                                           double rw_scale) {
  const std::size_t d = particles.front().theta.size();
  auto cov = weighted_covariance(particles, w);
  double max_diag = 0.0;
  for (std::size_t r = 0; r < d; ++r) max_diag = std::max(max_diag, cov[r * d + r]);
  const double ridge = 1e-12 + 1e-9 * max_diag;
  for (std::size_t r = 0; r < d; ++r) cov[r * d + r] += ridge;
  for (double& v : cov) v *= rw_scale;
  auto l = cholesky(cov, d);
  if (!l.empty()) return l;
  l.assign(d * d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    l[r * d + r] = std::sqrt(std::max(cov[r * d + r], 1e-12));
  }
  return l;
}

// One Metropolis-Hastings step per positive-weight particle, targeting
// prior x indicator{distance <= epsilon} with a Gaussian random walk.
// Proposals outside the prior (or structurally infeasible) are rejected
// without touching the simulator; the prior-ratio coin is also thrown before
// simulating, so only proposals that could still be accepted consume budget.
// Returns the number of simulations performed.
inline std::size_t move_sweep(ParticleCloud& cloud, const ModelSpec& spec,
                              const DistanceContext& ctx, double epsilon,
                              const std::vector<double>& chol,
                              const SamplerRun& run, std::uint64_t step_address) {
  const std::size_t d = spec.prior.dimension();
  const double observed_min = ctx.observed().min();
  std::atomic<std::size_t> simulations{0};
  parallel_for(cloud.size(), run.threads, [&](std::size_t i) {
    Particle& p = cloud.particles[i];
    if (!std::isfinite(p.log_weight)) return;
    RngStream rng(run.seed, run.run_id, i, step_address);

    ParameterVector proposal(d);
    std::vector<double> z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = rng.normal();
    for (std::size_t r = 0; r < d; ++r) {
      double shift = 0.0;
      for (std::size_t c = 0; c <= r; ++c) shift += chol[r * d + c] * z[c];
      proposal[r] = p.theta[r] + shift;
    }

    const double lp_new = prior_logdensity(spec.prior, proposal);
    if (!std::isfinite(lp_new)) return;
    if (!structurally_feasible(spec, proposal, observed_min)) return;
    const double lp_old = prior_logdensity(spec.prior, p.theta);
    if (std::log(rng.uniform_open()) >= lp_new - lp_old) return;

    RngStream sim_rng(run.seed, run.run_id, i, step_address + 1);
    const Dataset simulated = model_simulate(spec, proposal, sim_rng);
    simulations.fetch_add(1, std::memory_order_relaxed);
    const double dist = ctx.evaluate(simulated.values);
    if (dist <= epsilon) {
      p.theta = std::move(proposal);
      p.distance = dist;
    }
  });
  return simulations.load();
}

}  // namespace detail

// Acceptance threshold for plain rejection sampling: either a fixed tolerance
// or the empirical quantile that keeps a target fraction of draws.
struct RejectionRule {
  std::optional<double> epsilon;
  std::optional<double> accept_fraction;

  static RejectionRule fixed(double eps) { return {eps, std::nullopt}; }
  static RejectionRule fraction(double frac) { return {std::nullopt, frac}; }
};

inline ParticleCloud rejection_abc(const ModelSpec& spec, const DistanceContext& ctx,
                                   const RejectionRule& rule, std::size_t n_draws,
                                   const SamplerRun& run) {
  if (rule.epsilon.has_value() == rule.accept_fraction.has_value()) {
    throw InvalidParameter("give exactly one of a tolerance or an accept fraction");
  }
  if (rule.accept_fraction &&
      !(*rule.accept_fraction > 0.0 && *rule.accept_fraction <= 1.0)) {
    throw InvalidParameter("accept fraction must lie in (0, 1]");
  }
  if (n_draws == 0) throw InvalidParameter("need at least one draw");

  std::vector<Particle> draws(n_draws);
  const double observed_min = ctx.observed().min();
  std::atomic<std::size_t> simulations{0};
  parallel_for(n_draws, run.threads, [&](std::size_t i) {
    RngStream rng(run.seed, run.run_id, i, 0);
    Particle& p = draws[i];
    p.theta = prior_sample(spec.prior, rng);
    if (detail::structurally_feasible(spec, p.theta, observed_min)) {
      const Dataset simulated = model_simulate(spec, p.theta, rng);
      simulations.fetch_add(1, std::memory_order_relaxed);
      p.distance = ctx.evaluate(simulated.values);
    }
  });

  double epsilon;
  if (rule.epsilon) {
    epsilon = *rule.epsilon;
  } else {
    std::vector<double> distances(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) distances[i] = draws[i].distance;
    epsilon = detail::distance_quantile(std::move(distances), *rule.accept_fraction);
    if (!std::isfinite(epsilon)) {
      throw NoAcceptances("every draw is infinitely distant");
    }
  }

  ParticleCloud cloud;
  cloud.total_simulations = simulations.load();
  cloud.epsilon = epsilon;
  cloud.epsilon_trace = {epsilon};
  for (auto& p : draws) {
    if (p.distance <= epsilon) cloud.particles.push_back(std::move(p));
  }
  if (cloud.particles.empty()) {
    throw NoAcceptances("no draw passed the acceptance threshold");
  }
  const double lw = -std::log(static_cast<double>(cloud.particles.size()));
  for (auto& p : cloud.particles) p.log_weight = lw;
  cloud.ess = static_cast<double>(cloud.particles.size());
  return cloud;
}

// Replace the cloud by N offspring drawn with the variance-minimal stratified
// scheme (one uniform, expected counts N * w_i); weights reset equal.
inline void systematic_resample(ParticleCloud& cloud, RngStream& rng) {
  const std::size_t n = cloud.size();
  const auto w = cloud.normalized_weights();
  const double u = rng.uniform();
  std::vector<Particle> offspring;
  offspring.reserve(n);
  double cum = w[0];
  std::size_t ancestor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double position = (u + static_cast<double>(i)) / static_cast<double>(n);
    while (position >= cum && ancestor + 1 < n) cum += w[++ancestor];
    offspring.push_back(cloud.particles[ancestor]);
  }
  cloud.particles = std::move(offspring);
  const double lw = -std::log(static_cast<double>(n));
  for (auto& p : cloud.particles) p.log_weight = lw;
  cloud.ess = static_cast<double>(n);
}

// Adaptive SMC: initialize from the prior, then repeatedly tighten the
// tolerance to the alpha-quantile of the live distances, reweight by the
// indicator, resample when the effective sample size degrades, and rejuvenate
// particles with random-walk Metropolis-Hastings moves, until the simulation
// budget is exhausted or the tolerance stops improving.
inline ParticleCloud smc_abc(const ModelSpec& spec, const DistanceContext& ctx,
                             const SmcConfig& cfg, const SamplerRun& run) {
  validate(cfg);
  const std::size_t n = cfg.n_particles;
  const double observed_min = ctx.observed().min();

  ParticleCloud cloud;
  cloud.particles.resize(n);
  std::atomic<std::size_t> init_sims{0};
  parallel_for(n, run.threads, [&](std::size_t i) {
    RngStream rng(run.seed, run.run_id, i, 0);
    Particle& p = cloud.particles[i];
    p.theta = prior_sample(spec.prior, rng);
    p.log_weight = -std::log(static_cast<double>(n));
    if (detail::structurally_feasible(spec, p.theta, observed_min)) {
      const Dataset simulated = model_simulate(spec, p.theta, rng);
      init_sims.fetch_add(1, std::memory_order_relaxed);
      p.distance = ctx.evaluate(simulated.values);
    }
  });
  cloud.total_simulations = init_sims.load();
  cloud.ess = static_cast<double>(n);

  bool any_finite = false;
  for (const auto& p : cloud.particles) any_finite |= std::isfinite(p.distance);
  if (!any_finite) {
    throw DegenerateCloud("every initial particle is infinitely distant");
  }

  int stagnant_stages = 0;
  // Move step s of stage t draws from per-particle streams addressed
  // 1 + 2 * ((t - 1) * move_steps + s): proposals use the even slot, the
  // simulator the odd one, and slot 0 was initialization.
  for (std::uint64_t stage = 1;; ++stage) {
    std::vector<double> alive;
    auto weights = cloud.normalized_weights();
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] > 0.0) alive.push_back(cloud.particles[i].distance);
    }
    const double proposal_eps = detail::distance_quantile(std::move(alive),
                                                          cfg.alpha_quantile);
    const double prev_eps = cloud.epsilon;
    cloud.epsilon = std::min(cloud.epsilon, proposal_eps);
    cloud.epsilon_trace.push_back(cloud.epsilon);

    for (std::size_t i = 0; i < n; ++i) {
      if (!(cloud.particles[i].distance <= cloud.epsilon)) {
        cloud.particles[i].log_weight = -std::numeric_limits<double>::infinity();
      }
    }
    weights = cloud.normalized_weights();
    for (std::size_t i = 0; i < n; ++i) {
      cloud.particles[i].log_weight =
          weights[i] > 0.0 ? std::log(weights[i])
                           : -std::numeric_limits<double>::infinity();
    }
    cloud.ess = effective_sample_size(cloud);

    if (cloud.ess < cfg.ess_threshold_fraction * static_cast<double>(n)) {
      RngStream resample_rng(run.seed, run.run_id, detail::kResampleUnit, stage);
      systematic_resample(cloud, resample_rng);
    }

    if (std::isfinite(prev_eps)) {
      const double drop = (prev_eps - cloud.epsilon) / std::max(prev_eps, 1e-300);
      stagnant_stages = drop < 1e-4 ? stagnant_stages + 1 : 0;
    }
    if (stagnant_stages >= 3) break;
    if (cloud.total_simulations >= cfg.sim_budget) break;

    auto chol = detail::proposal_factor(cloud.particles, cloud.normalized_weights(),
                                        cfg.rw_scale);
    bool budget_hit = false;
    for (std::size_t s = 0; s < cfg.move_steps; ++s) {
      if (cloud.total_simulations >= cfg.sim_budget) {
        budget_hit = true;
        break;
      }
      const std::uint64_t step_address =
          1 + 2 * ((stage - 1) * cfg.move_steps + s);
      cloud.total_simulations += detail::move_sweep(cloud, spec, ctx, cloud.epsilon,
                                                    chol, run, step_address);
    }
    if (budget_hit) break;
  }

  std::vector<Particle> kept;
  for (auto& p : cloud.particles) {
    if (std::isfinite(p.log_weight)) kept.push_back(std::move(p));
  }
  cloud.particles = std::move(kept);
  const auto weights = cloud.normalized_weights();
  for (std::size_t i = 0; i < cloud.particles.size(); ++i) {
    cloud.particles[i].log_weight = std::log(weights[i]);
  }
  cloud.ess = effective_sample_size(cloud);
  return cloud;
}

}  // namespace mdabc
