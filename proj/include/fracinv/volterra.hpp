#pragma once

// Second-kind Volterra equations
//
//     r(t) = g(t) + ∫_0^t K(t,τ) r(τ) dτ
//
// on a uniform time grid, plus the differencing helpers used to turn r into
// a coefficient p = -r'/r.

#include "fracinv/time_grid.hpp"

#include <cstddef>
#include <functional>

namespace fracinv {

/// K(τ_m, τ_j) for j ≤ m, addressed by grid indices.
using KernelEvaluator = std::function<double(std::size_t m, std::size_t j)>;

struct VolterraProblem {
  SampledPath g;
  KernelEvaluator kernel;

  const TimeGrid& grid() const noexcept { return g.grid(); }

  /// Samples a continuous kernel K(t,τ) at grid nodes.
  static VolterraProblem from_continuous(SampledPath g, std::function<double(double t, double tau)> kernel);
};

/// Product-trapezoidal forward substitution:
///   r_0 = g_0,
///   r_m = [g_m + Δτ(K_m0 r_0 / 2 + Σ_{0<j<m} K_mj r_j)] / (1 - Δτ K_mm / 2).
/// Throws NumericalFailure when a denominator falls below 1e-8 in magnitude
/// or a kernel value is not finite.
SampledPath solve_second_kind(const VolterraProblem& problem);

/// Second-order derivative: central differences inside, three-point
/// one-sided stencils at both ends. Exact on quadratics. Needs M ≥ 3.
SampledPath differentiate(const SampledPath& path);

/// p = -r'/r; every sample of r must be positive.
SampledPath log_derivative_coefficient(const SampledPath& r);

/// ∫_0^(τ_m) v by the trapezoidal rule, for every m.
SampledPath cumulative_trapezoid(const SampledPath& path);

}  // namespace fracinv
