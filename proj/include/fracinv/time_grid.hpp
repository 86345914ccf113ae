#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracinv {

/// Uniform grid τ_m = m T / M on [0, T], M ≥ 2 steps.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t points() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  double at(std::size_t m) const noexcept { return horizon_ * static_cast<double>(m) / static_cast<double>(steps_); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  std::size_t steps_;
};

using TimeFunction = std::function<double(double t)>;

/// A real function of time sampled at every point of a TimeGrid.
class SampledPath {
 public:
  SampledPath(TimeGrid grid, std::vector<double> values);
  /// Samples fn at every grid point; throws NumericalFailure on a non-finite
  /// sample.
  static SampledPath sample(const TimeGrid& grid, const TimeFunction& fn);
  static SampledPath zeros(const TimeGrid& grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t m) const noexcept { return values_[m]; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Piecewise-linear interpolation in t, clamped to [0, T].
  double at(double t) const;
  TimeFunction as_function() const;

  double sup_norm() const;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// max_m |a_m - b_m|; the grids must match.
double sup_distance(const SampledPath& a, const SampledPath& b);

}  // namespace fracinv
