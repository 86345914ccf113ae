#pragma once

// Fractional heat equation on the whole line,
//
//     u_t + (-Δ)^s u = p(t) u + f(x,t),  x ∈ ℝ,
//
// truncated to [-L, L]: the heat kernel, its Duhamel solution, and recovery
// of p from the pair of point observations
//
//     w1(t) = u(q,t),   w2(t) = ((-Δ)^s u)(q,t).

#include "fracinv/forward.hpp"
#include "fracinv/spectral.hpp"
#include "fracinv/time_grid.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <mutex>
#include <utility>

namespace fracinv {

/// x_i = -L + i h, h = 2L/N, i = 0..N-1. Even N puts x = 0 on node N/2.
class LineGrid {
 public:
  LineGrid(double half_width, std::size_t n);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  double h() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
  double node(std::size_t i) const noexcept { return -half_width_ + static_cast<double>(i) * h(); }
  NodeArray nodes() const;
  NodeArray sample(const std::function<double(double)>& fn) const;
  /// Nearest node; q must lie in (-L, L).
  std::size_t nearest_node(double q) const;

 private:
  double half_width_;
  std::size_t n_;
};

/// P(x,t) = (1/π) ∫_0^∞ exp(-t ξ^(2s)) cos(x ξ) dξ.
///
/// The integral is cut at ξ* = max(1, (40/t)^(1/(2s))) and split into panels
/// no wider than min(π/(4|x|+1), ξ*/64); the first panel is further graded
/// toward ξ = 0 where ξ^(2s) is not smooth. Eight-point Gauss–Legendre on
/// every panel.
double heat_kernel(double x, double t, FractionalOrder s);

/// heat_kernel with a thread-safe memo keyed on (x, t).
class HeatKernel {
 public:
  explicit HeatKernel(FractionalOrder s) : s_(s) {}

  FractionalOrder order() const noexcept { return s_; }
  double operator()(double x, double t) const;
  std::size_t cached() const;

 private:
  FractionalOrder s_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, double> memo_;
};

/// ∫ P(x,t) dx: trapezoid on [-X, X], X = 50 t^(1/(2s)), plus the two tails
/// integrated from the large-|x| expansion of P.
double kernel_mass(FractionalOrder s, double t);

/// (-Δ)^s on the line through the FFT of the zero-padded samples
/// (padding factor 4). Throws UsageError when |f| at either end exceeds
/// decay_tol · max(1, ‖f‖_∞).
NodeArray frac_laplacian_line(const LineGrid& grid, const NodeArray& f, FractionalOrder s, double decay_tol = 1e-10);

/// Discrete propagator weights W_d(t), d = 0..N-1: inverse DFT of
/// exp(-t |ξ|^(2s)) on an 8x zero-padded frequency grid.
std::vector<double> propagator_weights(const LineGrid& grid, FractionalOrder s, double t);

/// Node values on the line; row m is u(·, τ_m).
struct LineField {
  LineGrid grid;
  TimeGrid time;
  Eigen::MatrixXd values;

  NodeArray at(std::size_t m) const { return values.row(static_cast<Eigen::Index>(m)).transpose(); }
};

struct CauchyOptions {
  /// Data must be below support_tol · max(1, sup) for |x| > L/2.
  double support_tol = 1e-10;
};

/// u(x,t) = ∫P(x-y,t)φ(y)dy + ∫_0^t ∫P(x-y,t-τ) r(τ) f(y,τ) dy dτ.
/// source is (M+1) × N, row m holding f(·, τ_m). The time integral uses the
/// trapezoidal rule; the τ = t end contributes (Δτ/2) r(t) f(·,t).
LineField solve_cauchy(const NodeArray& phi, const Eigen::MatrixXd& source, const SampledPath& r, FractionalOrder s,
                       const LineGrid& grid, const CauchyOptions& options = {});
LineField solve_cauchy(const NodeArray& phi, const SpaceTimeFunction& f, const SampledPath& r, FractionalOrder s,
                       const LineGrid& grid, const CauchyOptions& options = {});

/// exp(-∫_0^t p) at every grid time, integrating p by Gauss–Legendre per step.
SampledPath integrating_factor(const TimeFunction& p, const TimeGrid& grid);

struct PairObservation {
  SampledPath w1;
  SampledPath w2;
  SampledPath f_at_q;
  std::size_t node;
  double snapped_q;
};

/// Generates w1 = u(q,·) and w2 = ((-Δ)^s u)(q,·) for the coefficient p. Both
/// φ and f must be numerically supported in [-L/2, L/2]; their fractional
/// Laplacians are not checked. Throws AssumptionViolation when f(q,t) = 0 at
/// a grid time.
PairObservation observe_pair(FractionalOrder s, const NodeArray& phi, const SpaceTimeFunction& f, const TimeFunction& p,
                             double q, const LineGrid& grid, const TimeGrid& time, const CauchyOptions& options = {});

/// p = (w1' + w2 - f(q,·)) / w1. Throws NumericalFailure where w1 vanishes.
SampledPath recover_p_double(const SampledPath& w1, const SampledPath& w2, const SampledPath& f_at_q);

}  // namespace fracinv
