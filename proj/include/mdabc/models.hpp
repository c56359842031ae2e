#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mdabc/dataset.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/priors.hpp"
#include "mdabc/rng.hpp"

namespace mdabc {

// Observed-data corruption: each draw is independently replaced with
// probability `alpha` by a normal(zeta, nu) value; `nu` is a VARIANCE.
// Applied only when generating observed data, never inside inference.
struct ContaminationSpec {
  double alpha = 0.05;
  double zeta = 0.0;
  double nu = 0.01;
};

enum class ModelName { mixture, gk, mg1, sv };

inline std::string model_name_string(ModelName name) {
  switch (name) {
    case ModelName::mixture: return "mixture";
    case ModelName::gk: return "gk";
    case ModelName::mg1: return "mg1";
    case ModelName::sv: return "sv";
  }
  throw InvalidParameter("unknown model name");
}

inline ModelName model_name_from_string(const std::string& s) {
  if (s == "mixture") return ModelName::mixture;
  if (s == "gk") return ModelName::gk;
  if (s == "mg1") return ModelName::mg1;
  if (s == "sv") return ModelName::sv;
  throw InvalidParameter("unknown model name: " + s);
}

// A named simulator: parameter space with prior, observed/simulated sample
// sizes, optional observed-data contamination, and (for the volatility
// model) a warm-up length discarded from the front of every path.
struct ModelSpec {
  ModelName name = ModelName::mixture;
  PriorSpec prior;
  std::size_t n_obs = 100;
  std::size_t m_sim = 200;
  std::optional<ContaminationSpec> contamination;
  std::size_t burn_in = 0;

  static ModelSpec mixture(std::size_t n_obs = 100, std::size_t m_sim = 200,
                           std::optional<ContaminationSpec> contamination = {}) {
    ModelSpec spec;
    spec.name = ModelName::mixture;
    spec.prior.coords = {CoordinatePrior::normal(0.0, 1.0, "mu"),
                         CoordinatePrior::uniform(0.0, 1.0, "omega"),
                         CoordinatePrior::uniform(0.0, 10.0, "sigma1"),
                         CoordinatePrior::uniform(0.0, 10.0, "sigma2")};
    spec.n_obs = n_obs;
    spec.m_sim = m_sim;
    spec.contamination = contamination;
    return spec;
  }

  static ModelSpec gk(std::size_t n_obs = 100, std::size_t m_sim = 200) {
    ModelSpec spec;
    spec.name = ModelName::gk;
    spec.prior.coords = {CoordinatePrior::uniform(0.0, 10.0, "a"),
                         CoordinatePrior::uniform(0.0, 10.0, "b"),
                         CoordinatePrior::uniform(0.0, 10.0, "g"),
                         CoordinatePrior::uniform(0.0, 10.0, "k")};
    spec.n_obs = n_obs;
    spec.m_sim = m_sim;
    return spec;
  }

  static ModelSpec mg1(std::size_t n_obs = 50, std::size_t m_sim = 150) {
    ModelSpec spec;
    spec.name = ModelName::mg1;
    // Coordinate 1's prior applies to the service-window width
    // theta2 - theta1; see PriorSpec::second_is_increment.
    spec.prior.coords = {CoordinatePrior::uniform(0.0, 10.0, "theta1"),
                         CoordinatePrior::uniform(0.0, 10.0, "theta2"),
                         CoordinatePrior::uniform(0.0, 1.0 / 3.0, "theta3")};
    spec.prior.second_is_increment = true;
    spec.n_obs = n_obs;
    spec.m_sim = m_sim;
    return spec;
  }

  static ModelSpec sv(std::size_t n_obs = 500, std::size_t m_sim = 500,
                      std::size_t burn_in = 500,
                      std::optional<ContaminationSpec> contamination = {}) {
    ModelSpec spec;
    spec.name = ModelName::sv;
    spec.prior.coords = {CoordinatePrior::normal(0.0, 1.0, "pi"),
                         CoordinatePrior::uniform(0.0, 1.0, "beta"),
                         CoordinatePrior::uniform(0.0, 5.0, "sigma_u")};
    spec.n_obs = n_obs;
    spec.m_sim = m_sim;
    spec.burn_in = burn_in;
    if (contamination) {
      contamination->nu = 0.001;  // jump spread is fixed for this model
      spec.contamination = contamination;
    }
    return spec;
  }
};

namespace detail {

inline void require_dimension(const ParameterVector& theta, std::size_t d,
                              const char* what) {
  if (theta.size() != d) throw DimensionMismatch(what);
}

inline void require_count(std::size_t n) {
  if (n == 0) throw InvalidParameter("sample size must be positive");
}

// With probability alpha, replace the would-be draw by the contaminating
// normal; otherwise defer to `clean`, which must consume rng itself.
template <class CleanDraw>
double maybe_contaminated(const std::optional<ContaminationSpec>& c,
                          RngStream& rng, CleanDraw&& clean) {
  if (c) {
    if (rng.uniform() < c->alpha) {
      return rng.normal(c->zeta, std::sqrt(c->nu));
    }
  }
  return clean();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Two-component normal mixture: theta = (mu, omega, sigma1, sigma2), density
// (1-omega) N(mu, sigma1^2) + omega N(-mu, sigma2^2). The sigmas are standard
// deviations.

inline void validate_mixture_theta(const ParameterVector& theta) {
  detail::require_dimension(theta, 4, "mixture parameter is (mu, omega, sigma1, sigma2)");
  if (!(theta[1] >= 0.0 && theta[1] <= 1.0)) {
    throw InvalidParameter("mixture weight must lie in [0, 1]");
  }
  if (theta[2] < 0.0 || theta[3] < 0.0) {
    throw InvalidParameter("mixture scales must be nonnegative");
  }
}

inline Dataset simulate_mixture(const ParameterVector& theta, std::size_t n,
                                const std::optional<ContaminationSpec>& contamination,
                                RngStream& rng) {
  validate_mixture_theta(theta);
  detail::require_count(n);
  const double mu = theta[0], omega = theta[1], s1 = theta[2], s2 = theta[3];
  Dataset out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = detail::maybe_contaminated(contamination, rng, [&] {
      return rng.uniform() < 1.0 - omega ? rng.normal(mu, s1)
                                         : rng.normal(-mu, s2);
    });
  }
  return out;
}

inline double mixture_density(const ParameterVector& theta, double x) {
  validate_mixture_theta(theta);
  const double mu = theta[0], omega = theta[1], s1 = theta[2], s2 = theta[3];
  double acc = 0.0;
  if (1.0 - omega > 0.0 && s1 > 0.0) acc += (1.0 - omega) * normal_pdf(x, mu, s1);
  if (omega > 0.0 && s2 > 0.0) acc += omega * normal_pdf(x, -mu, s2);
  return acc;
}

inline double mixture_cdf(const ParameterVector& theta, double x) {
  validate_mixture_theta(theta);
  const double mu = theta[0], omega = theta[1], s1 = theta[2], s2 = theta[3];
  const auto component = [](double v, double mean, double sd) {
    if (sd > 0.0) return normal_cdf((v - mean) / sd);
    return v >= mean ? 1.0 : 0.0;
  };
  return (1.0 - omega) * component(x, mu, s1) + omega * component(x, -mu, s2);
}

// The mixture density is unchanged by (mu, omega, s1, s2) ->
// (-mu, 1-omega, s2, s1): both labelings generate identical data. Fold onto
// mu <= 0 so cloud summaries are comparable across runs.
inline ParameterVector mixture_canonical(const ParameterVector& theta) {
  detail::require_dimension(theta, 4, "mixture parameter is (mu, omega, sigma1, sigma2)");
  if (theta[0] <= 0.0) return theta;
  return {-theta[0], 1.0 - theta[1], theta[3], theta[2]};
}

// ---------------------------------------------------------------------------
// g-and-k distribution: theta = (a, b, g, k), defined by its quantile
// function; sampling is exact by inversion.

inline void validate_gk_theta(const ParameterVector& theta) {
  detail::require_dimension(theta, 4, "g-and-k parameter is (a, b, g, k)");
  if (!(theta[1] > 0.0)) throw InvalidParameter("g-and-k scale b must be positive");
  if (!(theta[3] > -0.5)) throw InvalidParameter("g-and-k kurtosis k must exceed -0.5");
}

inline double gk_quantile(const ParameterVector& theta, double q) {
  validate_gk_theta(theta);
  if (!(q > 0.0 && q < 1.0)) throw QOutOfRange("quantile level must lie in (0, 1)");
  const double a = theta[0], b = theta[1], g = theta[2], k = theta[3];
  const double z = inverse_normal_cdf(q);
  // (1 - e^{-gz}) / (1 + e^{-gz}) written as tanh(gz/2) so large |gz| cannot
  // overflow the exponentials.
  const double skew = 1.0 + 0.8 * std::tanh(0.5 * g * z);
  return a + b * skew * std::pow(1.0 + z * z, k) * z;
}

inline Dataset simulate_gk(const ParameterVector& theta, std::size_t n,
                           RngStream& rng) {
  validate_gk_theta(theta);
  detail::require_count(n);
  Dataset out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = gk_quantile(theta, rng.uniform_open());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-server queue: theta = (theta1, theta2, theta3); service times are
// uniform on [theta1, theta2], inter-arrival gaps exponential(theta3), and
// only inter-departure times are observed.

inline void validate_mg1_theta(const ParameterVector& theta) {
  detail::require_dimension(theta, 3, "queue parameter is (theta1, theta2, theta3)");
  if (!(theta[0] >= 0.0 && theta[1] >= theta[0])) {
    throw InvalidParameter("queue service window needs 0 <= theta1 <= theta2");
  }
  if (!(theta[2] > 0.0)) throw InvalidParameter("queue arrival rate must be positive");
}

// Deterministic queue recursion from given service times and inter-arrival
// gaps: y_i = u_i + max{0, sum_{j<=i} w_j - sum_{j<i} y_j}. Exposed so the
// recursion can be tested with injected sequences.
inline std::vector<double> mg1_interdeparture(const std::vector<double>& services,
                                              const std::vector<double>& gaps) {
  if (services.size() != gaps.size()) {
    throw LengthMismatch("need one inter-arrival gap per service time");
  }
  std::vector<double> y(services.size());
  double arrivals = 0.0, departures = 0.0;
  for (std::size_t i = 0; i < services.size(); ++i) {
    arrivals += gaps[i];
    y[i] = services[i] + std::max(0.0, arrivals - departures);
    departures += y[i];
  }
  return y;
}

inline Dataset simulate_mg1(const ParameterVector& theta, std::size_t n,
                            RngStream& rng) {
  validate_mg1_theta(theta);
  detail::require_count(n);
  std::vector<double> services(n), gaps(n);
  for (std::size_t i = 0; i < n; ++i) {
    services[i] = rng.uniform(theta[0], theta[1]);
    gaps[i] = rng.exponential(theta[2]);
  }
  Dataset out;
  out.values = mg1_interdeparture(services, gaps);
  return out;
}

// Inter-departure times can never undershoot the service-time floor, so any
// theta1 above the smallest observation is impossible under the model. The
// sampler marks such draws infinitely distant instead of simulating.
inline bool mg1_location_feasible(const ParameterVector& theta, double observed_min) {
  return theta[0] <= observed_min;
}

// ---------------------------------------------------------------------------
// Log-AR(1) stochastic volatility: theta = (pi, beta, sigma_u) with
// log s_t^2 = pi + beta log s_{t-1}^2 + sigma_u u_t and returns y_t = s_t v_t.
// Contamination replaces v_t by a jump component.

inline void validate_sv_theta(const ParameterVector& theta) {
  detail::require_dimension(theta, 3, "volatility parameter is (pi, beta, sigma_u)");
  if (!(std::fabs(theta[1]) < 1.0)) {
    throw InvalidParameter("volatility persistence must satisfy |beta| < 1");
  }
  if (!(theta[2] >= 0.0)) throw InvalidParameter("volatility-of-volatility must be nonnegative");
}

inline Dataset simulate_sv(const ParameterVector& theta, std::size_t n,
                           std::size_t burn_in,
                           const std::optional<ContaminationSpec>& contamination,
                           RngStream& rng) {
  validate_sv_theta(theta);
  detail::require_count(n);
  const double pi_loc = theta[0], beta = theta[1], sigma_u = theta[2];
  double log_var = pi_loc / (1.0 - beta);  // stationary mean of the chain
  for (std::size_t t = 0; t < burn_in; ++t) {
    log_var = pi_loc + beta * log_var + sigma_u * rng.normal();
  }
  Dataset out;
  out.values.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    log_var = pi_loc + beta * log_var + sigma_u * rng.normal();
    const double v = detail::maybe_contaminated(contamination, rng,
                                                [&] { return rng.normal(); });
    out.values[t] = std::exp(0.5 * log_var) * v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch. The sampler-facing entry point never contaminates: inference
// always targets the clean model. Observed-data generation applies the
// spec's contamination when present.

inline Dataset model_simulate(const ModelSpec& spec, const ParameterVector& theta,
                              RngStream& rng) {
  switch (spec.name) {
    case ModelName::mixture:
      return simulate_mixture(theta, spec.m_sim, std::nullopt, rng);
    case ModelName::gk:
      return simulate_gk(theta, spec.m_sim, rng);
    case ModelName::mg1:
      return simulate_mg1(theta, spec.m_sim, rng);
    case ModelName::sv:
      return simulate_sv(theta, spec.m_sim, spec.burn_in, std::nullopt, rng);
  }
  throw InvalidParameter("unknown model name");
}

inline Dataset generate_observed(const ModelSpec& spec, const ParameterVector& theta,
                                 RngStream& rng) {
  switch (spec.name) {
    case ModelName::mixture:
      return simulate_mixture(theta, spec.n_obs, spec.contamination, rng);
    case ModelName::gk:
      return simulate_gk(theta, spec.n_obs, rng);
    case ModelName::mg1:
      return simulate_mg1(theta, spec.n_obs, rng);
    case ModelName::sv:
      return simulate_sv(theta, spec.n_obs, spec.burn_in, spec.contamination, rng);
  }
  throw InvalidParameter("unknown model name");
}

}  // namespace mdabc
