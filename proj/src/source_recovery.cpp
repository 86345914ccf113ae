#include "fracinv/source_recovery.hpp"

#include "fracinv/error.hpp"
#include "fracinv/parallel.hpp"

#include <cmath>

namespace fracinv {

SourcePair recover_source(const DirichletSpectrum& spectrum, const NodeArray& phi, const NodeArray& psi,
                          const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  if (phi.size() != n || psi.size() != n) throw UsageError("initial and terminal data must match the grid");
  if (!phi.allFinite() || !psi.allFinite()) throw NumericalFailure("endpoint data contain non-finite values");

  const double horizon = grid.horizon();
  const Eigen::VectorXd phi_modes = project(phi, spectrum);
  const Eigen::VectorXd psi_modes = project(psi, spectrum);
  Eigen::VectorXd c_modes(n);
  Eigen::VectorXd f_modes(n);
  Eigen::MatrixXd u_modes(static_cast<Eigen::Index>(grid.points()), n);

  parallel::parallel_for(static_cast<std::size_t>(n), [&](std::size_t kk) {
    const auto k = static_cast<Eigen::Index>(kk);
    const double lambda = spectrum.eigenvalue(kk);
    const double gap = -std::expm1(-lambda * horizon);
    const double jump = phi_modes(k) - psi_modes(k);
    c_modes(k) = jump / gap;
    f_modes(k) = lambda * phi_modes(k) - lambda * jump / gap;
    for (std::size_t m = 0; m < grid.points(); ++m) {
      u_modes(static_cast<Eigen::Index>(m), k) = phi_modes(k) + jump * std::expm1(-lambda * grid.at(m)) / gap;
    }
  });
  if (!u_modes.allFinite() || !f_modes.allFinite()) throw NumericalFailure("source recovery produced non-finite values");

  StateField u(spectrum, grid, std::move(u_modes));
  const SpaceGrid& space = spectrum.grid();
  const double initial = norm_h(space, u.at(0) - phi);
  const double terminal = norm_h(space, u.at(grid.steps()) - psi);
  NodeArray f = synthesize(f_modes, spectrum);
  return {std::move(u), std::move(f), std::move(c_modes), std::move(f_modes), initial, terminal};
}

double roundtrip_check(const DirichletSpectrum& spectrum, const NodeArray& phi, const NodeArray& f_star,
                       const TimeGrid& grid) {
  const StateField forward = solve_forward_const_source(spectrum, phi, f_star, grid);
  const NodeArray psi = forward.at(grid.steps());
  const SourcePair recovered = recover_source(spectrum, phi, psi, grid);
  const SpaceGrid& space = spectrum.grid();
  const double error = norm_h(space, recovered.f - f_star);
  const double size = norm_h(space, f_star);
  return size == 0.0 ? error : error / size;
}

}  // namespace fracinv
