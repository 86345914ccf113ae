#include "fracinv/volterra.hpp"

#include "fracinv/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace fracinv {

VolterraProblem VolterraProblem::from_continuous(SampledPath g, std::function<double(double, double)> kernel) {
  const TimeGrid grid = g.grid();
  return {std::move(g), [grid, kernel = std::move(kernel)](std::size_t m, std::size_t j) {
            return kernel(grid.at(m), grid.at(j));
          }};
}

SampledPath solve_second_kind(const VolterraProblem& problem) {
  const TimeGrid& grid = problem.grid();
  const double dt = grid.dt();
  std::vector<double> r(grid.points());
  r[0] = problem.g[0];

  auto kernel = [&](std::size_t m, std::size_t j) {
    const double k = problem.kernel(m, j);
    if (!std::isfinite(k)) {
      throw NumericalFailure("Volterra kernel is not finite at (" + std::to_string(m) + ", " + std::to_string(j) + ")");
    }
    return k;
  };

  for (std::size_t m = 1; m < r.size(); ++m) {
    double acc = 0.5 * kernel(m, 0) * r[0];
    for (std::size_t j = 1; j < m; ++j) acc += kernel(m, j) * r[j];
    const double denom = 1.0 - 0.5 * dt * kernel(m, m);
    if (std::abs(denom) < 1e-8) {
      throw NumericalFailure("Volterra step " + std::to_string(m) + " has a near-singular diagonal (1 - dt K/2 = " +
                             std::to_string(denom) + ")");
    }
    r[m] = (problem.g[m] + dt * acc) / denom;
  }
  return SampledPath(grid, std::move(r));
}

SampledPath differentiate(const SampledPath& path) {
  const TimeGrid& grid = path.grid();
  const std::size_t last = grid.steps();
  if (last < 3) throw UsageError("differentiation needs at least 3 time steps");
  const double dt = grid.dt();
  std::vector<double> d(grid.points());
  d[0] = (-3.0 * path[0] + 4.0 * path[1] - path[2]) / (2.0 * dt);
  for (std::size_t m = 1; m < last; ++m) d[m] = (path[m + 1] - path[m - 1]) / (2.0 * dt);
  d[last] = (3.0 * path[last] - 4.0 * path[last - 1] + path[last - 2]) / (2.0 * dt);
  return SampledPath(grid, std::move(d));
}

SampledPath log_derivative_coefficient(const SampledPath& r) {
  for (std::size_t m = 0; m < r.size(); ++m) {
    if (!(r[m] > 0.0)) {
      throw NumericalFailure("r(t) must stay positive, but r = " + std::to_string(r[m]) + " at step " +
                             std::to_string(m));
    }
  }
  const SampledPath dr = differentiate(r);
  std::vector<double> p(r.size());
  for (std::size_t m = 0; m < p.size(); ++m) p[m] = -dr[m] / r[m];
  return SampledPath(r.grid(), std::move(p));
}

SampledPath cumulative_trapezoid(const SampledPath& path) {
  const double dt = path.grid().dt();
  std::vector<double> acc(path.size());
  acc[0] = 0.0;
  for (std::size_t m = 1; m < acc.size(); ++m) acc[m] = acc[m - 1] + 0.5 * dt * (path[m - 1] + path[m]);
  return SampledPath(path.grid(), std::move(acc));
}

}  // namespace fracinv
