#include "fracinv/error.hpp"
#include "fracinv/forward.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace fracinv;
using testing::interval_spectrum;

namespace {

const SpaceTimeFunction no_source = [](double, double) { return 0.0; };
const TimeFunction no_potential = [](double) { return 0.0; };

// Mode-1 solution u_1 = cos t for p ≡ c, with the matching source.
double manufactured_error(const DirichletSpectrum& spectrum, std::size_t steps, double* residual = nullptr) {
  const double c = 0.3;
  const double lambda = spectrum.eigenvalue(0);
  const TimeGrid grid(1.0, steps);
  const SpaceTimeFunction f = separable_source(spectrum.grid(), spectrum.mode(0), [=](double t) {
    return -std::sin(t) + (lambda - c) * std::cos(t);
  });
  const TimeFunction p = [c](double) { return c; };
  const StateField u = solve_forward(spectrum, spectrum.mode(0), f, p, grid);
  if (residual) *residual = weak_residual(u, p, f);
  double err = 0.0;
  for (std::size_t m = 0; m < grid.points(); ++m) {
    err = std::max(err, std::abs(u.modes()(static_cast<Eigen::Index>(m), 0) - std::cos(grid.at(m))));
  }
  return err;
}

}  // namespace

TEST_CASE("pure decay of the first mode") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);
  const TimeGrid grid(2.0, 50);
  const StateField u = solve_forward(spectrum, spectrum.mode(0), no_source, no_potential, grid);
  const double lambda = spectrum.eigenvalue(0);
  for (std::size_t m = 0; m < grid.points(); ++m) {
    const auto row = u.modes().row(static_cast<Eigen::Index>(m));
    CHECK(std::abs(row(0) - std::exp(-lambda * grid.at(m))) <= 1e-12);
    CHECK(row.tail(63).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("constant potential is integrated exactly") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);
  const TimeGrid grid(1.0, 20);
  const double c = 0.7;
  const StateField u = solve_forward(spectrum, spectrum.mode(0), no_source, [c](double) { return c; }, grid);
  const double lambda = spectrum.eigenvalue(0);
  for (std::size_t m = 0; m < grid.points(); ++m) {
    CHECK(std::abs(u.modes()(static_cast<Eigen::Index>(m), 0) - std::exp((c - lambda) * grid.at(m))) <= 1e-12);
  }
}

TEST_CASE("temporal convergence order on a manufactured mode") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);
  std::vector<double> errors;
  for (const std::size_t steps : {50u, 100u, 200u, 400u}) errors.push_back(manufactured_error(spectrum, steps));
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log2(errors[i] / errors[i + 1]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("weak residual") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);

  SUBCASE("exact single-mode decay") {
    const TimeGrid grid(1.0, 10000);
    const StateField u = solve_forward(spectrum, spectrum.mode(0), no_source, no_potential, grid);
    CHECK(weak_residual(u, no_potential, no_source) <= 1e-8);
  }
  SUBCASE("zero field") {
    const TimeGrid grid(1.0, 10);
    const StateField u = solve_forward(spectrum, NodeArray::Zero(64), no_source, no_potential, grid);
    CHECK(weak_residual(u, no_potential, no_source) == 0.0);
  }
  SUBCASE("second order under step halving") {
    double r1 = 0.0;
    double r2 = 0.0;
    manufactured_error(spectrum, 100, &r1);
    manufactured_error(spectrum, 200, &r2);
    CHECK(r1 / r2 >= 3.2);
    CHECK(r1 / r2 <= 4.8);
  }
}

TEST_CASE("energy decays at least like the first eigenvalue") {
  const DirichletSpectrum spectrum = interval_spectrum(0.4, 96);
  const SpaceGrid& space = spectrum.grid();
  std::mt19937_64 rng(5);
  const TimeGrid grid(3.0, 60);
  for (int trial = 0; trial < 5; ++trial) {
    const NodeArray phi = testing::random_vector(rng, 96);
    const StateField u = solve_forward(spectrum, phi, no_source, no_potential, grid);
    for (std::size_t m = 0; m < grid.points(); ++m) {
      const double bound = std::exp(-spectrum.eigenvalue(0) * grid.at(m)) * norm_h(space, phi);
      CHECK(norm_h(space, u.at(m)) <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("solution is linear in the data") {
  const DirichletSpectrum spectrum = interval_spectrum(0.6, 48);
  const SpaceGrid& space = spectrum.grid();
  std::mt19937_64 rng(9);
  const NodeArray phi1 = testing::random_vector(rng, 48);
  const NodeArray phi2 = testing::random_vector(rng, 48);
  const NodeArray g1 = testing::random_vector(rng, 48);
  const NodeArray g2 = testing::random_vector(rng, 48);
  const double alpha = 0.8;
  const double beta = -1.7;
  const TimeGrid grid(1.0, 40);
  const TimeFunction p = [](double t) { return std::sin(3.0 * t); };
  const auto f1 = separable_source(space, g1, [](double t) { return 1.0 + t; });
  const auto f2 = separable_source(space, g2, [](double t) { return std::cos(t); });
  const SpaceTimeFunction f12 = [&](double x, double t) { return alpha * f1(x, t) + beta * f2(x, t); };

  const StateField u1 = solve_forward(spectrum, phi1, f1, p, grid);
  const StateField u2 = solve_forward(spectrum, phi2, f2, p, grid);
  const StateField u12 = solve_forward(spectrum, alpha * phi1 + beta * phi2, f12, p, grid);
  const Eigen::MatrixXd combo = alpha * u1.modes() + beta * u2.modes();
  CHECK((u12.modes() - combo).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("state field invariants") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 32);
  std::mt19937_64 rng(1);
  const NodeArray phi = testing::random_vector(rng, 32);
  const TimeGrid grid(0.5, 10);
  const StateField u = solve_forward(spectrum, phi, no_source, no_potential, grid);
  CHECK((u.modes().row(0).transpose() - project(phi, spectrum)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((u.at(0) - phi).cwiseAbs().maxCoeff() <= 1e-9);
  const Eigen::MatrixXd nodes = u.node_values();
  for (std::size_t m = 0; m < grid.points(); ++m) {
    const NodeArray direct = synthesize(u.modes().row(static_cast<Eigen::Index>(m)).transpose(), spectrum);
    CHECK((nodes.row(static_cast<Eigen::Index>(m)).transpose() - direct).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("non-finite data are numerical failures") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 16);
  const TimeGrid grid(1.0, 4);
  const TimeFunction bad = [](double t) { return t > 0.5 ? std::nan("") : 0.0; };
  CHECK_THROWS_AS(solve_forward(spectrum, spectrum.mode(0), no_source, bad, grid), NumericalFailure);
}

TEST_CASE("closed-form constant source") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);
  const double lambda = spectrum.eigenvalue(0);
  const TimeGrid grid(2.0, 20);

  SUBCASE("growth from zero") {
    const StateField u = solve_forward_const_source(spectrum, NodeArray::Zero(64), lambda * spectrum.mode(0), grid);
    for (std::size_t m = 0; m < grid.points(); ++m) {
      CHECK(std::abs(u.modes()(static_cast<Eigen::Index>(m), 0) - (1.0 - std::exp(-lambda * grid.at(m)))) <= 1e-12);
    }
  }
  SUBCASE("no source is pure decay") {
    const StateField u = solve_forward_const_source(spectrum, spectrum.mode(0), NodeArray::Zero(64), grid);
    const StateField v = solve_forward(spectrum, spectrum.mode(0), no_source, no_potential, grid);
    CHECK((u.modes() - v.modes()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("steady state") {
    std::mt19937_64 rng(4);
    const NodeArray phi = testing::random_vector(rng, 64);
    const NodeArray source = spectrum.op().apply(phi);
    const StateField u = solve_forward_const_source(spectrum, phi, source, grid);
    for (std::size_t m = 0; m < grid.points(); ++m) {
      CHECK((u.at(m) - phi).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("point and weighted observations") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 63);
  const SpaceGrid& space = spectrum.grid();
  const TimeGrid grid(1.0, 10);
  const double lambda = spectrum.eigenvalue(0);
  const StateField decay = solve_forward(spectrum, spectrum.mode(0), no_source, no_potential, grid);
  const StateField zero = solve_forward(spectrum, NodeArray::Zero(63), no_source, no_potential, grid);

  const std::size_t i = 20;
  const PointObservation at_node = observe_point(decay, space.node(i));
  CHECK(at_node.node == i);
  CHECK(at_node.snapped_x == space.node(i));
  const double phi_q = spectrum.mode(0)(static_cast<Eigen::Index>(i));
  CHECK(testing::path_error(at_node.path, [&](double t) { return std::exp(-lambda * t) * phi_q; }) <= 1e-12);

  const PointObservation off_node = observe_point(decay, space.node(i) + 0.3 * space.h());
  CHECK(off_node.node == i);
  const PointObservation tie = observe_point(decay, space.node(i) + 0.5 * space.h());
  CHECK(tie.node == i);

  CHECK(observe_point(zero, 0.1).path.sup_norm() == 0.0);
  CHECK_THROWS_AS(observe_point(decay, 1.0), UsageError);
  CHECK_THROWS_AS(observe_point(decay, -2.0), UsageError);

  const SampledPath weighted = observe_weighted(decay, spectrum.mode(0));
  CHECK(testing::path_error(weighted, [&](double t) { return std::exp(-lambda * t); }) <= 1e-12);
  CHECK(observe_weighted(decay, NodeArray::Zero(63)).sup_norm() == 0.0);
  CHECK_THROWS_AS(observe_weighted(decay, NodeArray::Zero(62)), UsageError);
}

TEST_CASE("time grid and sampled paths") {
  CHECK_THROWS_AS(TimeGrid(1.0, 1), UsageError);
  CHECK_THROWS_AS(TimeGrid(0.0, 10), UsageError);
  const TimeGrid grid(2.0, 4);
  const SampledPath path = SampledPath::sample(grid, [](double t) { return t * t; });
  CHECK(path.at(0.25) == doctest::Approx(0.125));
  CHECK(path.at(5.0) == 4.0);
  CHECK_THROWS_AS(SampledPath(grid, {1.0, 2.0}), UsageError);
  CHECK_THROWS_AS(SampledPath::sample(grid, [](double) { return INFINITY; }), NumericalFailure);
}
