#include "fracinv/error.hpp"
#include "fracinv/volterra.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fracinv;

namespace {

SampledPath solve_unit_kernel(std::size_t steps) {
  const TimeGrid grid(1.0, steps);
  return solve_second_kind(VolterraProblem::from_continuous(SampledPath::sample(grid, [](double) { return 1.0; }),
                                                            [](double, double) { return 1.0; }));
}

}  // namespace

TEST_CASE("zero kernel returns the free term") {
  const TimeGrid grid(1.0, 20);
  const SampledPath g = SampledPath::sample(grid, [](double t) { return std::sin(5 * t) + 2.0; });
  const SampledPath r = solve_second_kind(VolterraProblem{g, [](std::size_t, std::size_t) { return 0.0; }});
  CHECK(sup_distance(r, g) == 0.0);
}

TEST_CASE("unit kernel gives the exponential") {
  const SampledPath r = solve_unit_kernel(400);
  CHECK(std::abs(r[400] - std::exp(1.0)) <= 1e-4);
}

TEST_CASE("exponential kernel reduces to a linear ODE") {
  const double lambda = 2.0;
  const TimeGrid grid(1.0, 400);
  const SampledPath r = solve_second_kind(VolterraProblem::from_continuous(
      SampledPath::sample(grid, [](double) { return 1.0; }),
      [lambda](double t, double tau) { return std::exp(lambda * (tau - t)); }));
  CHECK(std::abs(r[400] - 1.6321206) <= 1e-4);
  CHECK(testing::path_error(r, [](double t) { return 2.0 - std::exp(-t); }) <= 1e-4);
}

TEST_CASE("second-order convergence on the unit kernel") {
  std::vector<double> errors;
  for (const std::size_t steps : {100u, 200u, 400u, 800u}) {
    errors.push_back(testing::path_error(solve_unit_kernel(steps), [](double t) { return std::exp(t); }));
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log2(errors[i] / errors[i + 1]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("solution is linear in the free term") {
  const TimeGrid grid(2.0, 64);
  const auto kernel = [](double t, double tau) { return std::cos(t - 2 * tau); };
  const SampledPath g1 = SampledPath::sample(grid, [](double t) { return std::exp(-t); });
  const SampledPath g2 = SampledPath::sample(grid, [](double t) { return t * t - 1.0; });
  const double alpha = 1.3;
  const double beta = -0.6;
  const SampledPath g12 = SampledPath::sample(grid, [&](double t) { return alpha * g1.at(t) + beta * g2.at(t); });
  const SampledPath r1 = solve_second_kind(VolterraProblem::from_continuous(g1, kernel));
  const SampledPath r2 = solve_second_kind(VolterraProblem::from_continuous(g2, kernel));
  const SampledPath r12 = solve_second_kind(VolterraProblem::from_continuous(g12, kernel));
  double err = 0.0;
  for (std::size_t m = 0; m < grid.points(); ++m) err = std::max(err, std::abs(r12[m] - alpha * r1[m] - beta * r2[m]));
  CHECK(err <= 1e-10);
}

TEST_CASE("near-singular diagonal is a numerical failure") {
  const TimeGrid grid(1.0, 10);
  const SampledPath g = SampledPath::sample(grid, [](double) { return 1.0; });
  // 1 - (Δτ/2) K = 0 for K = 2/Δτ = 20.
  CHECK_THROWS_AS(solve_second_kind(VolterraProblem{g, [](std::size_t, std::size_t) { return 20.0; }}),
                  NumericalFailure);
  CHECK_THROWS_AS(solve_second_kind(VolterraProblem{g, [](std::size_t, std::size_t) { return std::nan(""); }}),
                  NumericalFailure);
}

TEST_CASE("differentiation") {
  const TimeGrid grid(1.5, 9);
  const SampledPath quad = SampledPath::sample(grid, [](double t) { return 3 * t * t - t + 2; });
  CHECK(testing::path_error(differentiate(quad), [](double t) { return 6 * t - 1; }) <= 1e-12);
  const SampledPath constant = SampledPath::sample(grid, [](double) { return 4.2; });
  CHECK(differentiate(constant).sup_norm() <= 1e-13);

  auto sin_error = [](std::size_t steps) {
    const SampledPath v = SampledPath::sample(TimeGrid(2.0, steps), [](double t) { return std::sin(t); });
    return testing::path_error(differentiate(v), [](double t) { return std::cos(t); });
  };
  const double ratio = sin_error(100) / sin_error(200);
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.4);

  CHECK_THROWS_AS(differentiate(SampledPath::sample(TimeGrid(1.0, 2), [](double t) { return t; })), UsageError);
}

TEST_CASE("cumulative trapezoid followed by differentiation") {
  const TimeGrid grid(1.0, 16);
  const SampledPath linear = SampledPath::sample(grid, [](double t) { return 2 * t + 1; });
  const SampledPath integral = cumulative_trapezoid(linear);
  CHECK(testing::path_error(integral, [](double t) { return t * t + t; }) <= 1e-14);
  CHECK(sup_distance(differentiate(integral), linear) <= 1e-12);
}

TEST_CASE("log-derivative coefficient") {
  const TimeGrid grid(1.0, 800);
  const SampledPath growth = SampledPath::sample(grid, [](double t) { return std::exp(t); });
  CHECK(testing::path_error(log_derivative_coefficient(growth), [](double) { return -1.0; }) <= 1e-6);

  const SampledPath r = SampledPath::sample(grid, [](double t) { return std::exp(-(1.0 - std::cos(t))); });
  CHECK(testing::path_error(log_derivative_coefficient(r), [](double t) { return std::sin(t); }) <= 1e-5);

  std::vector<double> values(grid.points(), 1.0);
  values[300] = 0.0;
  CHECK_THROWS_AS(log_derivative_coefficient(SampledPath(grid, values)), NumericalFailure);
}
