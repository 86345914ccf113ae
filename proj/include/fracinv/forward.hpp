#pragma once

// Eigen-expansion solver for
//
//     u_t + (-Δ)^s u = p(t) u + f(x,t)  on (a,b) × (0,T),
//     u(x,0) = φ(x),  u ≡ 0 outside (a,b).
//
// Each mode obeys u_k' = (p - λ_k) u_k + f_k and is advanced with the
// exponential-trapezoidal rule
//
//     u_k(τ_(m+1)) = E u_k(τ_m) + (Δτ/2) (f_k(τ_(m+1)) + E f_k(τ_m)),
//     E = exp((p̄_m - λ_k) Δτ),  p̄_m = (p(τ_m) + p(τ_(m+1))) / 2,
//
// which is second order and stable for arbitrarily stiff modes.

#include "fracinv/spectral.hpp"
#include "fracinv/time_grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace fracinv {

using SpaceTimeFunction = std::function<double(double x, double t)>;

/// f(x,t) = profile(x) g(t), with the profile given at the nodes of grid.
/// Only node coordinates may be passed as x.
SpaceTimeFunction separable_source(const SpaceGrid& grid, NodeArray profile, TimeFunction g);

/// f_k(τ_m) = (f(·,τ_m), φ_k)_h for every grid time; row m, column k.
Eigen::MatrixXd modal_source(const DirichletSpectrum& spectrum, const SpaceTimeFunction& f, const TimeGrid& grid);

/// u(x,t) on the space-time grid, stored through its modal coefficients.
class StateField {
 public:
  /// modes is (M+1) × n: row m holds u_k(τ_m).
  StateField(DirichletSpectrum spectrum, TimeGrid grid, Eigen::MatrixXd modes);

  const DirichletSpectrum& spectrum() const noexcept { return spectrum_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXd& modes() const noexcept { return modes_; }

  /// Node values at time index m, synthesised on demand.
  NodeArray at(std::size_t m) const;
  /// All node values; row m is u(·, τ_m).
  Eigen::MatrixXd node_values() const;

 private:
  DirichletSpectrum spectrum_;
  TimeGrid grid_;
  Eigen::MatrixXd modes_;
};

/// Advances every mode with the exponential-trapezoidal rule. source_modes
/// is the table returned by modal_source; p is sampled on the same grid.
StateField solve_forward_modal(const DirichletSpectrum& spectrum, const NodeArray& phi,
                               const Eigen::MatrixXd& source_modes, const SampledPath& p);

StateField solve_forward(const DirichletSpectrum& spectrum, const NodeArray& phi, const SpaceTimeFunction& f,
                         const TimeFunction& p, const TimeGrid& grid);

/// Time-independent source, p ≡ 0: u_k(t) = f_k/λ_k + (φ_k - f_k/λ_k) e^(-λ_k t)
/// evaluated in closed form. phi and source are node arrays.
StateField solve_forward_const_source(const DirichletSpectrum& spectrum, const NodeArray& phi,
                                      const NodeArray& source, const TimeGrid& grid);

struct PointObservation {
  SampledPath path;
  std::size_t node;  ///< index of the snapped node
  double snapped_x;  ///< its coordinate
};

/// u(x_i, τ_m) at the node nearest to q (ties to the lower index).
PointObservation observe_point(const StateField& field, double q);

/// (ω, u(·,τ_m))_h for every m.
SampledPath observe_weighted(const StateField& field, const NodeArray& omega);

/// max over k < k_check and interior m of
/// |u_k'(τ_m) + λ_k u_k - p u_k - f_k| with central differences in time.
double weak_residual(const StateField& field, const TimeFunction& p, const SpaceTimeFunction& f,
                     std::size_t k_check = 16);
/// Same, with the source already projected (see modal_source).
double weak_residual(const StateField& field, const SampledPath& p, const Eigen::MatrixXd& source_modes,
                     std::size_t k_check = 16);

}  // namespace fracinv
