#include "fracinv/spectral.hpp"

#include "fracinv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace fracinv {

FractionalOrder::FractionalOrder(double s) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) {
    std::ostringstream msg;
    msg << "fractional order s must lie in (0, 1), got " << s;
    throw UsageError(msg.str());
  }
}

SpaceGrid::SpaceGrid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n), h_(0.0) {
  if (!(std::isfinite(a) && std::isfinite(b) && b > a)) {
    throw UsageError("interval endpoints must be finite with a < b");
  }
  if (n < 2) throw UsageError("space grid needs at least 2 interior nodes");
  h_ = (b - a) / static_cast<double>(n + 1);
}

NodeArray SpaceGrid::nodes() const {
  NodeArray x(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) x(static_cast<Eigen::Index>(i)) = node(i);
  return x;
}

std::size_t SpaceGrid::nearest_node(double q) const {
  if (!(q > a_ && q < b_)) {
    std::ostringstream msg;
    msg << "observation point " << q << " is not inside (" << a_ << ", " << b_ << ")";
    throw UsageError(msg.str());
  }
  const double pos = (q - a_) / h_ - 1.0;
  const double idx = std::ceil(pos - 0.5);
  return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(n_ - 1)));
}

double inner_h(const SpaceGrid& grid, const NodeArray& u, const NodeArray& v) {
  if (u.size() != v.size() || static_cast<std::size_t>(u.size()) != grid.size()) {
    throw UsageError("inner product: node array length does not match the grid");
  }
  return grid.h() * u.dot(v);
}

double norm_h(const SpaceGrid& grid, const NodeArray& u) { return std::sqrt(inner_h(grid, u, u)); }

std::vector<double> riesz_weights(FractionalOrder order, std::size_t count) {
  if (count < 1) throw UsageError("riesz_weights: count must be at least 1");
  const double s = order.value();
  std::vector<double> g(count + 1);
  g[0] = std::tgamma(2.0 * s + 1.0) / (std::tgamma(s + 1.0) * std::tgamma(s + 1.0));
  for (std::size_t j = 0; j < count; ++j) {
    const double jd = static_cast<double>(j);
    g[j + 1] = g[j] * (jd - s) / (jd + s + 1.0);
  }
  return g;
}

OperatorMatrix OperatorMatrix::from_weights(FractionalOrder order, const SpaceGrid& grid,
                                            const std::vector<double>& weights) {
  if (weights.size() < grid.size()) {
    throw UsageError("operator assembly needs one weight per diagonal");
  }
  const double scale = std::pow(grid.h(), -2.0 * order.value());
  std::vector<double> row(grid.size());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = scale * weights[j];
  return OperatorMatrix(order, grid, std::move(row));
}

Eigen::MatrixXd OperatorMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = row_[static_cast<std::size_t>(i > j ? i - j : j - i)];
  }
  return a;
}

NodeArray OperatorMatrix::apply(const NodeArray& v) const {
  if (static_cast<std::size_t>(v.size()) != size()) {
    throw UsageError("operator apply: length mismatch");
  }
  const std::size_t n = size();
  NodeArray out = NodeArray::Zero(v.size());
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += entry(i, j) * v(static_cast<Eigen::Index>(j));
    out(static_cast<Eigen::Index>(i)) = acc;
  }
  return out;
}

OperatorMatrix assemble_operator(FractionalOrder order, const SpaceGrid& grid) {
  return OperatorMatrix::from_weights(order, grid, riesz_weights(order, grid.size()));
}

DirichletSpectrum::DirichletSpectrum(OperatorMatrix op, Eigen::VectorXd eigenvalues,
                                     Eigen::MatrixXd eigenvectors) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (eigenvalues.size() != n || eigenvectors.rows() != n || eigenvectors.cols() != n) {
    throw UsageError("spectrum shape does not match the grid");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(eigenvalues(k) > 0.0)) {
      throw NumericalFailure("operator is not positive definite: eigenvalue " +
                             std::to_string(k + 1) + " is " + std::to_string(eigenvalues(k)));
    }
    if (k > 0 && eigenvalues(k) < eigenvalues(k - 1)) {
      throw UsageError("eigenvalues must be sorted ascending");
    }
  }
  data_ = std::make_shared<const Data>(Data{std::move(op), std::move(eigenvalues), std::move(eigenvectors)});
}

DirichletSpectrum eigendecompose(const OperatorMatrix& matrix) {
  const Eigen::MatrixXd a = matrix.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("symmetric eigensolver did not converge");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  Eigen::MatrixXd vectors = solver.eigenvectors() / std::sqrt(matrix.grid().h());
  const Eigen::Index n = values.size();

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index at = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&at);
    if (vectors(at, k) < 0.0) vectors.col(k) = -vectors.col(k);
  }

  const double lambda_max = values(n - 1);
  const Eigen::MatrixXd residual = a * vectors - vectors * values.asDiagonal();
  const double worst = residual.cwiseAbs().maxCoeff();
  if (!(worst <= 1e-9 * lambda_max)) {
    std::ostringstream msg;
    msg << "eigenpair residual " << worst << " exceeds 1e-9 * lambda_n";
    throw NumericalFailure(msg.str());
  }
  const Eigen::MatrixXd gram = matrix.grid().h() * (vectors.transpose() * vectors);
  const double ortho = (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(ortho <= 1e-10)) {
    std::ostringstream msg;
    msg << "eigenvectors lost orthonormality (" << ortho << ")";
    throw NumericalFailure(msg.str());
  }
  if (n > 1 && !(values(1) - values(0) > 1e-8 * values(0))) {
    throw NumericalFailure("first eigenvalue is not simple");
  }
  return DirichletSpectrum(matrix, std::move(values), std::move(vectors));
}

double weyl_ratio(const DirichletSpectrum& spectrum, std::size_t k) {
  if (k < 1 || k > spectrum.size()) throw UsageError("weyl_ratio: k out of range");
  const double s = spectrum.order().value();
  const double leading =
      std::pow(std::numbers::pi * static_cast<double>(k) / spectrum.grid().length(), 2.0 * s);
  return spectrum.eigenvalue(k - 1) / leading;
}

Eigen::VectorXd project(const NodeArray& values, const DirichletSpectrum& spectrum) {
  if (static_cast<std::size_t>(values.size()) != spectrum.size()) {
    throw UsageError("project: node array length " + std::to_string(values.size()) +
                     " does not match grid size " + std::to_string(spectrum.size()));
  }
  return spectrum.grid().h() * (spectrum.eigenvectors().transpose() * values);
}

NodeArray synthesize(const Eigen::VectorXd& coeffs, const DirichletSpectrum& spectrum) {
  if (static_cast<std::size_t>(coeffs.size()) != spectrum.size()) {
    throw UsageError("synthesize: coefficient count does not match the basis");
  }
  return spectrum.eigenvectors() * coeffs;
}

WeightedSumBound weighted_sum_bound(const DirichletSpectrum& spectrum, const Eigen::VectorXd& coeffs, int m) {
  if (m < 2) throw UsageError("weighted_sum_bound: m must be at least 2");
  if (static_cast<std::size_t>(coeffs.size()) != spectrum.size()) {
    throw UsageError("weighted_sum_bound: coefficient count does not match the basis");
  }
  const Eigen::VectorXd& lambda = spectrum.eigenvalues();
  const double lhs = lambda.dot(coeffs.cwiseAbs());

  double big_lambda = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) big_lambda += std::pow(lambda(k), -2.0 * (m - 1));

  NodeArray v = synthesize(coeffs, spectrum);
  for (int i = 0; i < m; ++i) v = spectrum.op().apply(v);
  const double rhs = std::sqrt(big_lambda) * norm_h(spectrum.grid(), v);
  return {lhs, rhs};
}

}  // namespace fracinv
