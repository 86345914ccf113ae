#include "fracinv/time_grid.hpp"

#include "fracinv/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracinv {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw UsageError("time horizon T must be positive");
  if (steps < 2) throw UsageError("time grid needs at least 2 steps");
}

SampledPath::SampledPath(TimeGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.points()) {
    throw UsageError("sampled path has " + std::to_string(values_.size()) + " values, grid has " +
                     std::to_string(grid_.points()) + " points");
  }
  for (std::size_t m = 0; m < values_.size(); ++m) {
    if (!std::isfinite(values_[m])) {
      throw NumericalFailure("sampled path is not finite at step " + std::to_string(m));
    }
  }
}

SampledPath SampledPath::sample(const TimeGrid& grid, const TimeFunction& fn) {
  std::vector<double> values(grid.points());
  for (std::size_t m = 0; m < values.size(); ++m) values[m] = fn(grid.at(m));
  return SampledPath(grid, std::move(values));
}

SampledPath SampledPath::zeros(const TimeGrid& grid) { return SampledPath(grid, std::vector<double>(grid.points(), 0.0)); }

double SampledPath::at(double t) const {
  const double pos = std::clamp(t / grid_.dt(), 0.0, static_cast<double>(grid_.steps()));
  const auto lo = std::min(static_cast<std::size_t>(pos), grid_.steps() - 1);
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * values_[lo] + frac * values_[lo + 1];
}

TimeFunction SampledPath::as_function() const {
  return [copy = *this](double t) { return copy.at(t); };
}

double SampledPath::sup_norm() const {
  double worst = 0.0;
  for (double v : values_) worst = std::max(worst, std::abs(v));
  return worst;
}

double sup_distance(const SampledPath& a, const SampledPath& b) {
  if (!(a.grid() == b.grid())) throw UsageError("paths live on different time grids");
  double worst = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) worst = std::max(worst, std::abs(a[m] - b[m]));
  return worst;
}

}  // namespace fracinv
