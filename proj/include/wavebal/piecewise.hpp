#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "wavebal/errors.hpp"

namespace wavebal {

/// Right-continuous piecewise-constant function on [0, 1].
///
/// breakpoints[i] is the left end of the interval carrying values[i]; the
/// first breakpoint must be 0 and the last interval extends to x = 1.
/// at(x) returns the value of the interval containing x, so at(b) for a
/// breakpoint b is the limit from the right.
class PiecewiseConstant {
 public:
  PiecewiseConstant() : breakpoints_{0.0}, values_{0.0} {}

  PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.empty() || breakpoints_.size() != values_.size())
      throw ConfigError("piecewise data needs one value per breakpoint");
    if (breakpoints_.front() != 0.0)
      throw ConfigError("piecewise breakpoints must start at 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
      if (!(breakpoints_[i] > breakpoints_[i - 1]))
        throw ConfigError("piecewise breakpoints must be strictly increasing");
    if (breakpoints_.back() >= 1.0)
      throw ConfigError("piecewise breakpoints must lie inside [0, 1)");
    for (double v : values_)
      if (!std::isfinite(v)) throw ConfigError("piecewise values must be finite");
  }

  static PiecewiseConstant constant(double v) { return {{0.0}, {v}}; }

  double at(double x) const {
    // Last interval whose left end is <= x; x below 0 clamps to the first.
    std::size_t lo = 0, hi = breakpoints_.size();
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (breakpoints_[mid] <= x)
        lo = mid;
      else
        hi = mid;
    }
    return values_[lo];
  }

  double integral() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      sum += values_[i] * (right_end(i) - breakpoints_[i]);
    return sum;
  }

  /// Total variation over the open interval (0, 1): interior jumps only.
  double total_variation() const {
    double tv = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i)
      tv += std::abs(values_[i] - values_[i - 1]);
    return tv;
  }

  double min_value() const {
    double m = values_[0];
    for (double v : values_) m = std::min(m, v);
    return m;
  }
  double max_value() const {
    double m = values_[0];
    for (double v : values_) m = std::max(m, v);
    return m;
  }

  PiecewiseConstant shifted(double offset) const {
    PiecewiseConstant out = *this;
    for (double& v : out.values_) v += offset;
    return out;
  }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }

 private:
  double right_end(std::size_t i) const {
    return i + 1 < breakpoints_.size() ? breakpoints_[i + 1] : 1.0;
  }
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

}  // namespace wavebal
