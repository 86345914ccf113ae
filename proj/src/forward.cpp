#include "fracinv/forward.hpp"

#include "fracinv/error.hpp"
#include "fracinv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracinv {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw NumericalFailure(std::string(what) + " contains non-finite values");
}

}  // namespace

SpaceTimeFunction separable_source(const SpaceGrid& grid, NodeArray profile, TimeFunction g) {
  if (static_cast<std::size_t>(profile.size()) != grid.size()) throw UsageError("profile length does not match the grid");
  return [grid, profile = std::move(profile), g = std::move(g)](double x, double t) {
    return profile(static_cast<Eigen::Index>(grid.nearest_node(x))) * g(t);
  };
}

Eigen::MatrixXd modal_source(const DirichletSpectrum& spectrum, const SpaceTimeFunction& f, const TimeGrid& grid) {
  const SpaceGrid& space = spectrum.grid();
  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd nodal(n, static_cast<Eigen::Index>(grid.points()));
  for (std::size_t m = 0; m < grid.points(); ++m) {
    const double t = grid.at(m);
    for (Eigen::Index i = 0; i < n; ++i) nodal(i, static_cast<Eigen::Index>(m)) = f(space.node(static_cast<std::size_t>(i)), t);
  }
  require_finite(nodal, "source samples");
  return space.h() * (nodal.transpose() * spectrum.eigenvectors());
}

StateField::StateField(DirichletSpectrum spectrum, TimeGrid grid, Eigen::MatrixXd modes)
    : spectrum_(std::move(spectrum)), grid_(grid), modes_(std::move(modes)) {
  if (modes_.rows() != static_cast<Eigen::Index>(grid_.points()) ||
      modes_.cols() != static_cast<Eigen::Index>(spectrum_.size())) {
    throw UsageError("state field shape does not match its grids");
  }
}

NodeArray StateField::at(std::size_t m) const {
  return spectrum_.eigenvectors() * modes_.row(static_cast<Eigen::Index>(m)).transpose();
}

Eigen::MatrixXd StateField::node_values() const { return modes_ * spectrum_.eigenvectors().transpose(); }

StateField solve_forward_modal(const DirichletSpectrum& spectrum, const NodeArray& phi,
                               const Eigen::MatrixXd& source_modes, const SampledPath& p) {
  const TimeGrid& grid = p.grid();
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  const auto points = static_cast<Eigen::Index>(grid.points());
  if (source_modes.rows() != points || source_modes.cols() != n) {
    throw UsageError("source table shape does not match the grids");
  }
  if (!phi.allFinite()) throw NumericalFailure("initial datum contains non-finite values");
  require_finite(source_modes, "source table");

  const Eigen::VectorXd phi_modes = project(phi, spectrum);
  const double dt = grid.dt();
  std::vector<double> p_mean(grid.steps());
  for (std::size_t m = 0; m < grid.steps(); ++m) p_mean[m] = 0.5 * (p[m] + p[m + 1]);

  Eigen::MatrixXd modes(points, n);
  parallel::parallel_for(static_cast<std::size_t>(n), [&](std::size_t kk) {
    const auto k = static_cast<Eigen::Index>(kk);
    const double lambda = spectrum.eigenvalue(kk);
    double u = phi_modes(k);
    modes(0, k) = u;
    for (Eigen::Index m = 0; m + 1 < points; ++m) {
      const double decay = std::exp((p_mean[static_cast<std::size_t>(m)] - lambda) * dt);
      u = decay * u + 0.5 * dt * (source_modes(m + 1, k) + decay * source_modes(m, k));
      modes(m + 1, k) = u;
    }
  });
  require_finite(modes, "forward solution");
  return StateField(spectrum, grid, std::move(modes));
}

StateField solve_forward(const DirichletSpectrum& spectrum, const NodeArray& phi, const SpaceTimeFunction& f,
                         const TimeFunction& p, const TimeGrid& grid) {
  return solve_forward_modal(spectrum, phi, modal_source(spectrum, f, grid), SampledPath::sample(grid, p));
}

StateField solve_forward_const_source(const DirichletSpectrum& spectrum, const NodeArray& phi,
                                      const NodeArray& source, const TimeGrid& grid) {
  const Eigen::VectorXd phi_modes = project(phi, spectrum);
  const Eigen::VectorXd f_modes = project(source, spectrum);
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  Eigen::MatrixXd modes(static_cast<Eigen::Index>(grid.points()), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = spectrum.eigenvalue(static_cast<std::size_t>(k));
    const double steady = f_modes(k) / lambda;
    for (std::size_t m = 0; m < grid.points(); ++m) {
      modes(static_cast<Eigen::Index>(m), k) = steady + (phi_modes(k) - steady) * std::exp(-lambda * grid.at(m));
    }
  }
  require_finite(modes, "forward solution");
  return StateField(spectrum, grid, std::move(modes));
}

PointObservation observe_point(const StateField& field, double q) {
  const SpaceGrid& space = field.spectrum().grid();
  const std::size_t node = space.nearest_node(q);
  const Eigen::VectorXd row = field.spectrum().eigenvectors().row(static_cast<Eigen::Index>(node)).transpose();
  const Eigen::VectorXd values = field.modes() * row;
  return {SampledPath(field.grid(), std::vector<double>(values.data(), values.data() + values.size())), node,
          space.node(node)};
}

SampledPath observe_weighted(const StateField& field, const NodeArray& omega) {
  const Eigen::VectorXd omega_modes = project(omega, field.spectrum());
  const Eigen::VectorXd values = field.modes() * omega_modes;
  return SampledPath(field.grid(), std::vector<double>(values.data(), values.data() + values.size()));
}

double weak_residual(const StateField& field, const SampledPath& p, const Eigen::MatrixXd& source_modes,
                     std::size_t k_check) {
  const TimeGrid& grid = field.grid();
  const Eigen::MatrixXd& u = field.modes();
  const auto kmax = static_cast<Eigen::Index>(std::min(k_check, field.spectrum().size()));
  const double dt = grid.dt();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < kmax; ++k) {
    const double lambda = field.spectrum().eigenvalue(static_cast<std::size_t>(k));
    for (std::size_t m = 1; m < grid.steps(); ++m) {
      const auto r = static_cast<Eigen::Index>(m);
      const double du = (u(r + 1, k) - u(r - 1, k)) / (2.0 * dt);
      const double res = du + lambda * u(r, k) - p[m] * u(r, k) - source_modes(r, k);
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

double weak_residual(const StateField& field, const TimeFunction& p, const SpaceTimeFunction& f, std::size_t k_check) {
  return weak_residual(field, SampledPath::sample(field.grid(), p), modal_source(field.spectrum(), f, field.grid()),
                       k_check);
}

}  // namespace fracinv
