#include "fracinv/error.hpp"
#include "fracinv/recovery.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracinv;
using testing::interval_spectrum;

namespace {

double kernel_deviation(const AssembledVolterra& a, const std::function<double(double, double)>& exact) {
  const TimeGrid& grid = a.volterra.grid();
  double err = 0.0;
  for (std::size_t m = 0; m < grid.points(); ++m) {
    for (std::size_t j = 0; j <= m; ++j) {
      err = std::max(err, std::abs(a.volterra.kernel(m, j) - exact(grid.at(m), grid.at(j))));
    }
  }
  return err;
}

SampledPath point_datum(const DirichletSpectrum& spectrum, const NodeArray& phi, const SpaceTimeFunction& f,
                        const TimeFunction& p, double q, const TimeGrid& grid) {
  return observe_point(solve_forward(spectrum, phi, f, p, grid), q).path;
}

// φ_1 plus a multiple of φ_3 whose sign keeps φ_k φ_k(q) ≥ 0.
NodeArray two_mode_phi(const DirichletSpectrum& spectrum, double q) {
  const std::size_t node = spectrum.grid().nearest_node(q);
  const double sign = spectrum.mode(2)(static_cast<Eigen::Index>(node)) >= 0.0 ? 1.0 : -1.0;
  return spectrum.mode(0) + 0.2 * sign * spectrum.mode(2);
}

DirichletSpectrum flipped(const DirichletSpectrum& spectrum) {
  Eigen::MatrixXd vectors = spectrum.eigenvectors();
  for (Eigen::Index k = 0; k < vectors.cols(); k += 2) vectors.col(k) *= -1.0;
  return DirichletSpectrum(spectrum.op(), spectrum.eigenvalues(), vectors);
}

}  // namespace

TEST_CASE("point datum: decaying mode data give unit free term and kernel") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 128);
  const double lambda = spectrum.eigenvalue(0);
  const double q = 0.3;
  const double phi_q = spectrum.mode(0)(static_cast<Eigen::Index>(spectrum.grid().nearest_node(q)));
  const TimeGrid grid(1.0, 100);
  const SingleDatumProblem problem{
      spectrum, spectrum.mode(0),
      separable_source(spectrum.grid(), spectrum.mode(0), [=](double t) { return std::exp(-lambda * t); }), q,
      SampledPath::sample(grid, [=](double t) { return std::exp(-lambda * t) * phi_q; })};
  const AssembledVolterra a = assemble_single(problem);
  CHECK(testing::path_error(a.volterra.g, [](double) { return 1.0; }) <= 1e-10);
  CHECK(kernel_deviation(a, [](double, double) { return 1.0; }) <= 1e-10);
  CHECK(a.node == spectrum.grid().nearest_node(q));
}

TEST_CASE("point datum: zero source gives zero kernel and zero coefficient") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 128);
  const double lambda = spectrum.eigenvalue(0);
  const double q = -0.2;
  const double phi_q = spectrum.mode(0)(static_cast<Eigen::Index>(spectrum.grid().nearest_node(q)));
  const TimeGrid grid(1.0, 200);
  const SingleDatumProblem problem{spectrum, spectrum.mode(0), [](double, double) { return 0.0; }, q,
                                   SampledPath::sample(grid, [=](double t) { return std::exp(-lambda * t) * phi_q; })};
  const AssembledVolterra a = assemble_single(problem);
  CHECK(kernel_deviation(a, [](double, double) { return 0.0; }) == 0.0);
  const RecoveryResult result = recover_single(problem);
  CHECK(sup_distance(result.r, a.volterra.g) == 0.0);
  CHECK(result.p.sup_norm() <= 1e-6);
}

TEST_CASE("point datum: assumption violations") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);
  const TimeGrid grid(1.0, 20);
  const SpaceTimeFunction f = separable_source(spectrum.grid(), spectrum.mode(0), [](double) { return 1.0; });

  SUBCASE("incompatible initial value") {
    SingleDatumProblem problem{spectrum, spectrum.mode(0), f, 0.0,
                               SampledPath::sample(grid, [](double) { return 123.0; })};
    try {
      assemble_single(problem);
      FAIL("expected an assumption violation");
    } catch (const AssumptionViolation& e) {
      CHECK(e.assumption() == "(iii)");
    }
  }
  SUBCASE("datum vanishing") {
    const double phi_q = spectrum.mode(0)(static_cast<Eigen::Index>(spectrum.grid().nearest_node(0.0)));
    SingleDatumProblem problem{spectrum, spectrum.mode(0), f, 0.0,
                               SampledPath::sample(grid, [=](double t) { return phi_q * (1.0 - 2.0 * t); })};
    CHECK_THROWS_AS(assemble_single(problem), AssumptionViolation);
  }
  SUBCASE("sign condition on the initial modes") {
    const std::size_t node = spectrum.grid().nearest_node(0.0);
    const double sign = spectrum.mode(2)(static_cast<Eigen::Index>(node)) >= 0.0 ? 1.0 : -1.0;
    const NodeArray phi = spectrum.mode(0) - 0.2 * sign * spectrum.mode(2);
    const double phi_q = phi(static_cast<Eigen::Index>(node));
    SingleDatumProblem problem{spectrum, phi, f, 0.0, SampledPath::sample(grid, [=](double) { return phi_q; })};
    try {
      assemble_single(problem);
      FAIL("expected an assumption violation");
    } catch (const AssumptionViolation& e) {
      CHECK(e.assumption() == "(i)");
    }
  }
}

TEST_CASE("point datum: decaying mode example recovers p = -1 consistently") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 256);
  const double lambda = spectrum.eigenvalue(0);
  const double q = 0.3;
  const double phi_q = spectrum.mode(0)(static_cast<Eigen::Index>(spectrum.grid().nearest_node(q)));
  const TimeGrid grid(1.0, 800);
  const SingleDatumProblem problem{
      spectrum, spectrum.mode(0),
      separable_source(spectrum.grid(), spectrum.mode(0), [=](double t) { return std::exp(-lambda * t); }), q,
      SampledPath::sample(grid, [=](double t) { return std::exp(-lambda * t) * phi_q; })};
  const RecoveryResult result = recover_single(problem);
  CHECK(testing::path_error(result.p, [](double) { return -1.0; }) <= 1e-2);
  CHECK(testing::path_error(result.r, [](double t) { return std::exp(t); }) <= 1e-4);
  CHECK(forward_consistency(problem, result) <= 5e-3);
  CHECK(result.diagnostics.observation_residual <= 5e-3 * problem.w.sup_norm());
}

TEST_CASE("point datum: manufactured coefficient cos t") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 128);
  const double q = 0.1;
  const NodeArray phi = two_mode_phi(spectrum, q);
  const SpaceTimeFunction f = separable_source(spectrum.grid(), spectrum.mode(0), [](double t) { return 1.0 + t; });
  const TimeFunction p_star = [](double t) { return std::cos(t); };
  const TimeGrid grid(1.0, 800);
  const SingleDatumProblem problem{spectrum, phi, f, q, point_datum(spectrum, phi, f, p_star, q, grid)};
  const RecoveryResult result = recover_single(problem);
  CHECK(testing::path_error(result.p, p_star) <= 1e-2);
  CHECK(forward_consistency(problem, result) <= 5e-3);
}

TEST_CASE("point datum: kernel sums are stable under mode truncation") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 128);
  const double q = 0.0;
  const SpaceTimeFunction f =
      separable_source(spectrum.grid(), spectrum.mode(0), [](double t) { return 1.0 + 0.5 * std::sin(t); });
  const TimeGrid grid(1.0, 400);
  SingleDatumProblem problem{spectrum, spectrum.mode(0), f, q,
                             point_datum(spectrum, spectrum.mode(0), f, [](double t) { return t; }, q, grid)};
  const RecoveryResult full = recover_single(problem);
  problem.mode_limit = 64;
  const RecoveryResult half = recover_single(problem);
  CHECK(sup_distance(full.p, half.p) <= 1e-3);
}

TEST_CASE("assembly is independent of eigenvector signs") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 96);
  const DirichletSpectrum other = flipped(spectrum);
  const SpaceGrid& space = spectrum.grid();
  const TimeGrid grid(1.0, 50);
  const double q = 0.25;
  const NodeArray phi = two_mode_phi(spectrum, q);
  const SpaceTimeFunction f = [](double x, double t) { return (1.0 - x * x) * (1.0 + t); };

  const SampledPath w = point_datum(spectrum, phi, f, [](double) { return 0.0; }, q, grid);
  const AssembledVolterra a = assemble_single({spectrum, phi, f, q, w});
  const AssembledVolterra b = assemble_single({other, phi, f, q, w});
  CHECK(sup_distance(a.volterra.g, b.volterra.g) <= 1e-12);
  CHECK((*a.kernel_table - *b.kernel_table).cwiseAbs().maxCoeff() <= 1e-12);

  const NodeArray omega = space.nodes().unaryExpr([](double x) { return 1.0 + x; });
  const StateField u = solve_forward(spectrum, phi, f, [](double) { return 0.0; }, grid);
  const SampledPath wn = observe_weighted(u, omega);
  const AssembledVolterra c = assemble_nonlocal({spectrum, phi, f, omega, wn});
  const AssembledVolterra d = assemble_nonlocal({other, phi, f, omega, wn});
  CHECK(sup_distance(c.volterra.g, d.volterra.g) <= 1e-12);
  CHECK((*c.kernel_table - *d.kernel_table).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("weighted datum: example closed forms") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 256);
  const double lambda = spectrum.eigenvalue(0);
  const TimeGrid grid(1.0, 800);
  const auto s2 = [](double t) { return 1.0 + std::sin(t) * std::sin(t); };
  const NonlocalDatumProblem problem{spectrum, spectrum.mode(0), separable_source(spectrum.grid(), spectrum.mode(0), s2),
                                     spectrum.mode(0), SampledPath::sample(grid, [](double t) { return 1.0 + t * t; })};
  const AssembledVolterra a = assemble_nonlocal(problem);
  CHECK(testing::path_error(a.volterra.g, [&](double t) {
          return (2 * t + lambda * std::exp(-lambda * t)) / s2(t);
        }) <= 1e-10);
  CHECK(kernel_deviation(a, [&](double t, double tau) {
          return lambda * s2(tau) * std::exp(-lambda * (t - tau)) / s2(t);
        }) <= 1e-10);

  const RecoveryResult result = recover_nonlocal(problem);
  double rel = 0.0;
  for (std::size_t m = 0; m < grid.points(); ++m) {
    const double t = grid.at(m);
    const double exact = (lambda + 2 * t + lambda * t * t) / s2(t);
    rel = std::max(rel, std::abs(result.r[m] - exact) / exact);
  }
  CHECK(rel <= 1e-2);
  CHECK(std::abs(result.r[0] - lambda) <= 1e-10 * lambda);
  CHECK(testing::path_error(observe_weighted(result.u, spectrum.mode(0)), [](double t) { return 1.0 + t * t; }) <=
        1e-3);
  CHECK(forward_consistency(problem, result) <= 5e-3);
}

TEST_CASE("weighted datum: manufactured factor and scaling") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 128);
  const SpaceGrid& space = spectrum.grid();
  const TimeGrid grid(1.0, 400);
  const NodeArray phi = space.nodes().unaryExpr([](double x) { return 1.0 - x * x; });
  const NodeArray omega = space.nodes().unaryExpr([](double x) { return std::exp(x); });
  const NodeArray profile = space.nodes().unaryExpr([](double x) { return std::cos(x); });
  const auto r_star = [](double t) { return 1.0 + t; };
  const SpaceTimeFunction f = separable_source(space, profile, [](double t) { return 1.0 + 0.3 * t; });
  const SpaceTimeFunction rf = [&](double x, double t) { return r_star(t) * f(x, t); };
  const SampledPath w = observe_weighted(solve_forward(spectrum, phi, rf, [](double) { return 0.0; }, grid), omega);

  const RecoveryResult result = recover_nonlocal({spectrum, phi, f, omega, w});
  CHECK(testing::path_error(result.r, r_star) <= 1e-2);
  CHECK(result.p.sup_norm() == 0.0);

  const double c = 2.5;
  const SpaceTimeFunction cf = [&](double x, double t) { return c * f(x, t); };
  const RecoveryResult scaled = recover_nonlocal({spectrum, phi, cf, omega, w});
  double err = 0.0;
  for (std::size_t m = 0; m < grid.points(); ++m) err = std::max(err, std::abs(scaled.r[m] - result.r[m] / c));
  CHECK(err <= 1e-10 * result.r.sup_norm());
}

TEST_CASE("weighted datum: assumption violations") {
  const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);
  const TimeGrid grid(1.0, 20);
  const SpaceTimeFunction f = separable_source(spectrum.grid(), spectrum.mode(0), [](double) { return 1.0; });

  SUBCASE("weight orthogonal to the source") {
    const NonlocalDatumProblem problem{spectrum, spectrum.mode(1), f, spectrum.mode(1),
                                       SampledPath::sample(grid, [](double) { return 1.0; })};
    try {
      assemble_nonlocal(problem);
      FAIL("expected an assumption violation");
    } catch (const AssumptionViolation& e) {
      CHECK(e.assumption() == "weight-source nondegeneracy");
    }
  }
  SUBCASE("incompatible initial value") {
    const NonlocalDatumProblem problem{spectrum, spectrum.mode(0), f, spectrum.mode(0),
                                       SampledPath::sample(grid, [](double) { return 3.0; })};
    try {
      assemble_nonlocal(problem);
      FAIL("expected an assumption violation");
    } catch (const AssumptionViolation& e) {
      CHECK(e.assumption() == "weighted compatibility");
    }
  }
}
