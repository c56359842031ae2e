#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "mdabc/errors.hpp"

namespace mdabc {

// A univariate sample in generation order.  Time-series simulators emit
// ordered paths; consumers that need order statistics build an
// EmpiricalMeasure instead of mutating the sample.
struct Dataset {
  std::vector<double> values;
  bool generation_order_preserved = true;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

// A sample viewed as the uniform probability measure on its points, stored
// sorted so distribution-function queries reduce to binary search.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> values)
      : sorted_(std::move(values)) {
    if (sorted_.empty()) {
      throw DegenerateSample("EmpiricalMeasure: empty sample");
    }
    std::sort(sorted_.begin(), sorted_.end());
  }

  explicit EmpiricalMeasure(const Dataset& data)
      : EmpiricalMeasure(std::vector<double>(data.values)) {}

  const std::vector<double>& sorted_values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

// Right-continuous empirical distribution function: the fraction of sample
// points <= x.
inline double ecdf_eval(const EmpiricalMeasure& measure, double x) {
  const auto& v = measure.sorted_values();
  const auto it = std::upper_bound(v.begin(), v.end(), x);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

}  // namespace mdabc
