#pragma once

// Recovery of the time-dependent coefficient p(t) in
//
//     u_t + (-Δ)^s u = p(t) u + f(x,t)
//
// from a point datum w(t) = u(q,t), and of the factor r(t) in
//
//     u_t + (-Δ)^s u = r(t) f(x,t)
//
// from a weighted datum w(t) = (ω, u(·,t)). Both reduce to a second-kind
// Volterra equation for r; in the point case p = -r'/r.

#include "fracinv/forward.hpp"
#include "fracinv/spectral.hpp"
#include "fracinv/time_grid.hpp"
#include "fracinv/volterra.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fracinv {

struct AssumptionCheck {
  std::string name;
  bool satisfied;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  std::vector<std::string> warnings;
};

struct SingleDatumProblem {
  DirichletSpectrum spectrum;
  NodeArray phi;
  SpaceTimeFunction f;
  double q;
  SampledPath w;
  double compat_tol = 1e-6;
  /// Number of modes kept in the kernel sums; 0 keeps all of them.
  std::size_t mode_limit = 0;
};

struct NonlocalDatumProblem {
  DirichletSpectrum spectrum;
  NodeArray phi;
  SpaceTimeFunction f;
  NodeArray omega;
  SampledPath w;
  double compat_tol = 1e-6;
  std::size_t mode_limit = 0;
};

/// The assembled Volterra equation together with the modal tables that
/// were used to build it.
struct AssembledVolterra {
  VolterraProblem volterra;
  Eigen::MatrixXd source_modes;  ///< f_k(τ_m); row m, column k
  Eigen::VectorXd phi_modes;
  std::shared_ptr<const Eigen::MatrixXd> kernel_table;  ///< K(τ_m, τ_j), lower triangle
  std::size_t modes_used;
  std::optional<std::size_t> node;  ///< snapped observation node (point datum)
  AssumptionReport assumptions;
};

struct RecoveryDiagnostics {
  std::optional<std::size_t> node;
  std::optional<double> snapped_q;
  double observation_residual;  ///< ‖observed path - w‖_∞
  double weak_residual;
  AssumptionReport assumptions;
};

struct RecoveryResult {
  SampledPath r;
  SampledPath p;  ///< -r'/r for the point datum; zero for the weighted datum
  StateField u;
  RecoveryDiagnostics diagnostics;
};

/// g(t) = Σ φ_k e^(-λ_k t) φ_k(q) / w(t),
/// K(t,τ) = Σ φ_k(q) f_k(τ) e^(-λ_k (t-τ)) / w(t).
/// Throws AssumptionViolation naming (i) or (iii) when the data violate them;
/// (ii) is only reported as a warning.
AssembledVolterra assemble_single(const SingleDatumProblem& problem);

/// g(t) = [w'(t) + Σ λ_k φ_k e^(-λ_k t) ω_k] / (ω, f(·,t)),
/// K(t,τ) = Σ λ_k f_k(τ) e^(-λ_k (t-τ)) ω_k / (ω, f(·,t)).
AssembledVolterra assemble_nonlocal(const NonlocalDatumProblem& problem);

RecoveryResult recover_single(const SingleDatumProblem& problem);
RecoveryResult recover_nonlocal(const NonlocalDatumProblem& problem);

/// Re-simulates the forward problem with the recovered coefficient and
/// returns ‖observed - w‖_∞ / ‖w‖_∞.
double forward_consistency(const SingleDatumProblem& problem, const RecoveryResult& result);
double forward_consistency(const NonlocalDatumProblem& problem, const RecoveryResult& result);

}  // namespace fracinv
