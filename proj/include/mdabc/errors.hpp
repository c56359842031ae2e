#pragma once

#include <stdexcept>
#include <string>

namespace mdabc {

// A smoothing grid does not cover the span the data (plus kernel tails) needs.
struct GridTooNarrow : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A sample is unusable for the requested statistic (empty, too small, or
// constant where spread is required).
struct DegenerateSample : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Two sequences that must be paired element-for-element have different sizes.
struct LengthMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A parameter value violates a model or algorithm precondition.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameter vectors of different dimensions were mixed in one container.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A quantile-function argument lies outside the open unit interval.
struct QOutOfRange : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Fixed-threshold rejection sampling accepted zero draws.
struct NoAcceptances : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sampler cannot make progress (e.g. every initial distance is infinite).
struct DegenerateCloud : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation that needs weighted particles received none (or zero total
// weight).
struct EmptyCloud : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The optimizer could not produce a usable point estimate.
struct OptimizerFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reading or writing a report/dataset file failed.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A run configuration file is malformed or fails validation.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace mdabc
