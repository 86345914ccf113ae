#pragma once

// Discrete Dirichlet fractional Laplacian on an interval.
//
// The operator is the restricted fractional Laplacian: u is extended by zero
// outside (a,b) and the singular integral runs over the whole line. (Some
// authors call this operator "regional"; the formula implemented here is the
// zero-extension one.) It is discretised by fractional centred differences on
// a uniform grid of interior nodes, which gives the symmetric Toeplitz matrix
//
//     A(i,j) = h^(-2s) g_|i-j|,   g_0 = Γ(2s+1)/Γ(s+1)²,
//     g_(j+1) = g_j (j - s)/(j + s + 1),
//
// whose Fourier symbol |2 sin(ξh/2)/h|^(2s) tends to |ξ|^(2s) as h → 0.
//
// Node arrays are Eigen vectors over the interior nodes. The inner product
// is the h-weighted sum (u,v)_h = h Σ u_i v_i, and eigenvectors are
// orthonormal under it.

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <vector>

namespace fracinv {

using NodeArray = Eigen::VectorXd;

/// Order s of (-Δ)^s, strictly inside (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double s);
  double value() const noexcept { return s_; }

 private:
  double s_;
};

/// Uniform grid of n interior nodes x_i = a + (i+1)h, h = (b-a)/(n+1).
class SpaceGrid {
 public:
  SpaceGrid(double a, double b, std::size_t n);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t size() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  double length() const noexcept { return b_ - a_; }
  double node(std::size_t i) const noexcept { return a_ + static_cast<double>(i + 1) * h_; }
  NodeArray nodes() const;

  /// Index of the node closest to q; a tie goes to the lower index.
  /// Throws UsageError unless a < q < b.
  std::size_t nearest_node(double q) const;

 private:
  double a_;
  double b_;
  std::size_t n_;
  double h_;
};

double inner_h(const SpaceGrid& grid, const NodeArray& u, const NodeArray& v);
double norm_h(const SpaceGrid& grid, const NodeArray& u);

/// Fractional centred-difference weights g_0..g_count, evaluated by the
/// recurrence (no large-argument gamma calls). g_0 > 0, g_j < 0 for j >= 1.
std::vector<double> riesz_weights(FractionalOrder order, std::size_t count);

/// Symmetric Toeplitz matrix stored as its first row, already scaled by
/// h^(-2s).
class OperatorMatrix {
 public:
  /// Builds the matrix from explicit weights g_0..g_(n-1) (unscaled).
  /// assemble_operator is the normal entry point; this one exists so tests
  /// and fault injection can supply altered weights.
  static OperatorMatrix from_weights(FractionalOrder order, const SpaceGrid& grid,
                                     const std::vector<double>& weights);

  FractionalOrder order() const noexcept { return order_; }
  const SpaceGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double entry(std::size_t i, std::size_t j) const noexcept {
    return row_[i > j ? i - j : j - i];
  }
  const std::vector<double>& first_row() const noexcept { return row_; }

  Eigen::MatrixXd dense() const;
  /// Toeplitz matrix-vector product, O(n²).
  NodeArray apply(const NodeArray& v) const;

 private:
  OperatorMatrix(FractionalOrder order, SpaceGrid grid, std::vector<double> row)
      : order_(order), grid_(grid), row_(std::move(row)) {}

  FractionalOrder order_;
  SpaceGrid grid_;
  std::vector<double> row_;
};

OperatorMatrix assemble_operator(FractionalOrder order, const SpaceGrid& grid);

/// Eigenpairs of the discrete operator, λ ascending, eigenvectors
/// h-orthonormal with the largest-magnitude entry of each one positive.
///
/// Immutable; copies share the underlying arrays.
class DirichletSpectrum {
 public:
  /// Validates ordering, positivity and shapes. Used by eigendecompose and
  /// by tests that need a modified basis (e.g. sign flips).
  DirichletSpectrum(OperatorMatrix op, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors);

  const SpaceGrid& grid() const noexcept { return data_->op.grid(); }
  FractionalOrder order() const noexcept { return data_->op.order(); }
  const OperatorMatrix& op() const noexcept { return data_->op; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(data_->values.size()); }

  /// 0-based: eigenvalue(0) is λ_1.
  double eigenvalue(std::size_t index) const { return data_->values(static_cast<Eigen::Index>(index)); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return data_->values; }
  /// Column k holds mode k+1 sampled at the nodes.
  const Eigen::MatrixXd& eigenvectors() const noexcept { return data_->vectors; }
  Eigen::VectorXd mode(std::size_t index) const {
    return data_->vectors.col(static_cast<Eigen::Index>(index));
  }

 private:
  struct Data {
    OperatorMatrix op;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
  };
  std::shared_ptr<const Data> data_;
};

/// Dense symmetric eigendecomposition. Throws NumericalFailure when the
/// solver does not converge or the result fails its residual
/// (‖Aφ - λφ‖_∞ ≤ 1e-9 λ_n), orthonormality (1e-10) or simplicity checks.
DirichletSpectrum eigendecompose(const OperatorMatrix& matrix);

/// λ_k / (πk/|Ω|)^(2s), the ratio to the leading Weyl term in one
/// dimension. k is 1-based.
double weyl_ratio(const DirichletSpectrum& spectrum, std::size_t k);

/// (v, φ_k)_h for every k.
Eigen::VectorXd project(const NodeArray& values, const DirichletSpectrum& spectrum);
/// Σ_k c_k φ_k.
NodeArray synthesize(const Eigen::VectorXd& coeffs, const DirichletSpectrum& spectrum);

struct WeightedSumBound {
  double lhs;  ///< Σ λ_k |c_k|
  double rhs;  ///< Λ^(1/2) ‖A^m v‖_h, Λ = Σ λ_k^(-2(m-1))
  bool holds(double rel_slack = 1e-12) const { return lhs <= rhs * (1.0 + rel_slack); }
};

/// Evaluates both sides of Σ λ_k|c_k| ≤ Λ^(1/2) ‖A^m v‖_h for v = Σ c_k φ_k.
/// The right side applies the Toeplitz matrix m times, independently of the
/// eigenvalues used on the left. Requires m ≥ 2.
WeightedSumBound weighted_sum_bound(const DirichletSpectrum& spectrum, const Eigen::VectorXd& coeffs, int m);

}  // namespace fracinv
