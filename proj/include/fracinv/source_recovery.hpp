#pragma once

// Recovery of a time-independent source f(x) in
//
//     u_t + (-Δ)^s u = f(x),  u(·,0) = φ,  u(·,T) = ψ.
//
// Mode by mode, with d_k = 1 - e^(-λ_k T):
//
//     f_k   = λ_k φ_k + λ_k (ψ_k - φ_k) / d_k,
//     u_k(t) = φ_k + (φ_k - ψ_k) (e^(-λ_k t) - 1) / d_k.
//
// d_k and e^(-λ_k t) - 1 are evaluated with expm1 so λ_k T ≪ 1 stays exact.

#include "fracinv/forward.hpp"
#include "fracinv/spectral.hpp"
#include "fracinv/time_grid.hpp"

#include <Eigen/Dense>

namespace fracinv {

struct SourcePair {
  StateField u;
  NodeArray f;
  Eigen::VectorXd c_modes;  ///< C_k = (φ_k - ψ_k) / d_k
  Eigen::VectorXd f_modes;
  double initial_residual;   ///< ‖u(·,0) - φ‖_h
  double terminal_residual;  ///< ‖u(·,T) - ψ‖_h
};

/// T is the horizon of the time grid.
SourcePair recover_source(const DirichletSpectrum& spectrum, const NodeArray& phi, const NodeArray& psi,
                          const TimeGrid& grid);

/// Solves forward with (φ, f*), takes ψ = u(·,T), recovers f and returns
/// ‖f - f*‖_h / ‖f*‖_h, or the absolute error when f* = 0.
double roundtrip_check(const DirichletSpectrum& spectrum, const NodeArray& phi, const NodeArray& f_star,
                       const TimeGrid& grid);

}  // namespace fracinv
