#include "fracinv/freespace.hpp"

#include "fracinv/error.hpp"
#include "fracinv/volterra.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fracinv {

namespace {

using GaussLegendre8 = boost::math::quadrature::gauss<double, 8>;

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Multiplies the spectrum of every zero-padded row by a real even symbol.
class PaddedTransform {
 public:
  explicit PaddedTransform(std::size_t padded) : padded_(padded), bins_(padded / 2 + 1) {
    real_ = fftw_alloc_real(padded_);
    spec_ = fftw_alloc_complex(bins_);
    std::lock_guard lock(fftw_planner_mutex());
    const int len = static_cast<int>(padded_);
    forward_ = fftw_plan_dft_r2c_1d(len, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(len, spec_, real_, FFTW_ESTIMATE);
  }
  ~PaddedTransform() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(backward_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }
  PaddedTransform(const PaddedTransform&) = delete;
  PaddedTransform& operator=(const PaddedTransform&) = delete;

  std::size_t bins() const noexcept { return bins_; }

  // Inverse transform of a real symbol given on the non-negative bins.
  std::vector<double> inverse(const std::vector<double>& symbol) {
    for (std::size_t k = 0; k < bins_; ++k) {
      spec_[k][0] = symbol[k];
      spec_[k][1] = 0.0;
    }
    fftw_execute(backward_);
    std::vector<double> out(real_, real_ + padded_);
    for (double& v : out) v /= static_cast<double>(padded_);
    return out;
  }

  NodeArray filter(const NodeArray& f, const std::vector<double>& symbol) {
    const auto n = static_cast<std::size_t>(f.size());
    std::fill(real_, real_ + padded_, 0.0);
    std::copy(f.data(), f.data() + n, real_);
    fftw_execute(forward_);
    for (std::size_t k = 0; k < bins_; ++k) {
      spec_[k][0] *= symbol[k];
      spec_[k][1] *= symbol[k];
    }
    fftw_execute(backward_);
    NodeArray out(f.size());
    for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = real_[i] / static_cast<double>(padded_);
    return out;
  }

 private:
  std::size_t padded_;
  std::size_t bins_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// |ξ_k|^(2s) on the bins of a padded grid with spacing h.
std::vector<double> laplacian_symbol(std::size_t padded, double h, double two_s) {
  std::vector<double> symbol(padded / 2 + 1);
  for (std::size_t k = 0; k < symbol.size(); ++k) {
    const double xi = 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(padded) * h);
    symbol[k] = k == 0 ? 0.0 : std::pow(xi, two_s);
  }
  return symbol;
}

void check_decay(const NodeArray& f, double tol) {
  const double sup = f.cwiseAbs().maxCoeff();
  const double ends = std::max(std::abs(f(0)), std::abs(f(f.size() - 1)));
  if (ends > tol * std::max(1.0, sup)) {
    throw UsageError("data do not decay at the ends of the line grid (|f| = " + std::to_string(ends) +
                     "); increase L");
  }
}

void check_support(const LineGrid& grid, const NodeArray& values, double sup, double tol, const char* what) {
  const double limit = tol * std::max(1.0, sup);
  const double half = 0.5 * grid.half_width();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid.node(i)) > half && std::abs(values(static_cast<Eigen::Index>(i))) > limit) {
      throw UsageError(std::string(what) + " is not supported in [-L/2, L/2]: |value| = " +
                       std::to_string(std::abs(values(static_cast<Eigen::Index>(i)))) + " at x = " +
                       std::to_string(grid.node(i)) + "; increase L");
    }
  }
}

}  // namespace

LineGrid::LineGrid(double half_width, std::size_t n) : half_width_(half_width), n_(n) {
  if (!(std::isfinite(half_width) && half_width > 0.0)) throw UsageError("line half-width L must be positive");
  if (n < 4) throw UsageError("line grid needs at least 4 nodes");
}

NodeArray LineGrid::nodes() const {
  NodeArray x(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) x(static_cast<Eigen::Index>(i)) = node(i);
  return x;
}

NodeArray LineGrid::sample(const std::function<double(double)>& fn) const {
  NodeArray v(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) v(static_cast<Eigen::Index>(i)) = fn(node(i));
  return v;
}

std::size_t LineGrid::nearest_node(double q) const {
  if (!(q > -half_width_ && q < half_width_)) {
    throw UsageError("observation point q = " + std::to_string(q) + " is outside (-L, L)");
  }
  const double pos = (q + half_width_) / h();
  const auto idx = static_cast<long long>(std::ceil(pos - 0.5));
  return static_cast<std::size_t>(std::clamp<long long>(idx, 0, static_cast<long long>(n_) - 1));
}

double heat_kernel(double x, double t, FractionalOrder s) {
  if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("heat kernel needs t > 0");
  const double two_s = 2.0 * s.value();
  const double ax = std::abs(x);
  const double xi_star = std::max(1.0, std::pow(40.0 / t, 1.0 / two_s));
  const double max_width = std::min(std::numbers::pi / (4.0 * ax + 1.0), xi_star / 64.0);
  const auto panels = static_cast<std::size_t>(std::ceil(xi_star / max_width));
  const double width = xi_star / static_cast<double>(panels);
  auto integrand = [&](double xi) { return std::exp(-t * std::pow(xi, two_s)) * std::cos(ax * xi); };

  double sum = 0.0;
  double hi = width;
  for (int level = 0; level < 12; ++level) {
    const double lo = 0.15 * hi;
    sum += GaussLegendre8::integrate(integrand, lo, hi);
    hi = lo;
  }
  sum += GaussLegendre8::integrate(integrand, 0.0, hi);
  for (std::size_t j = 1; j < panels; ++j) {
    sum += GaussLegendre8::integrate(integrand, static_cast<double>(j) * width, static_cast<double>(j + 1) * width);
  }
  return sum / std::numbers::pi;
}

double HeatKernel::operator()(double x, double t) const {
  const std::pair key{std::abs(x), t};
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  const double value = heat_kernel(x, t, s_);
  std::lock_guard lock(mutex_);
  memo_[key] = value;
  return value;
}

std::size_t HeatKernel::cached() const {
  std::lock_guard lock(mutex_);
  return memo_.size();
}

double kernel_mass(FractionalOrder s, double t) {
  const double two_s = 2.0 * s.value();
  const double scale = std::pow(t, 1.0 / two_s);
  constexpr int count = 500;
  constexpr double reach = 50.0;
  const double dx = reach * scale / count;
  double trap = 0.5 * heat_kernel(0.0, t, s);
  for (int i = 1; i < count; ++i) trap += heat_kernel(i * dx, t, s);
  trap += 0.5 * heat_kernel(reach * scale, t, s);
  trap *= 2.0 * dx;

  // P(y,1) ~ (1/π) Σ_k (-1)^(k+1) Γ(2sk+1) sin(πsk)/k! |y|^(-1-2sk)
  double tail = 0.0;
  double factorial = 1.0;
  for (int k = 1; k <= 6; ++k) {
    factorial *= k;
    const double sign = k % 2 == 1 ? 1.0 : -1.0;
    const double coeff = sign * std::tgamma(two_s * k + 1.0) * std::sin(std::numbers::pi * s.value() * k) / factorial;
    tail += coeff * std::pow(reach, -two_s * k) / (two_s * k);
  }
  return trap + 2.0 * tail / std::numbers::pi;
}

NodeArray frac_laplacian_line(const LineGrid& grid, const NodeArray& f, FractionalOrder s, double decay_tol) {
  if (static_cast<std::size_t>(f.size()) != grid.size()) throw UsageError("data length does not match the line grid");
  if (!f.allFinite()) throw NumericalFailure("line data contain non-finite values");
  check_decay(f, decay_tol);
  const std::size_t padded = 4 * grid.size();
  PaddedTransform transform(padded);
  return transform.filter(f, laplacian_symbol(padded, grid.h(), 2.0 * s.value()));
}

std::vector<double> propagator_weights(const LineGrid& grid, FractionalOrder s, double t) {
  const std::size_t padded = 8 * grid.size();
  std::vector<double> symbol = laplacian_symbol(padded, grid.h(), 2.0 * s.value());
  for (double& v : symbol) v = std::exp(-t * v);
  PaddedTransform transform(padded);
  std::vector<double> w = transform.inverse(symbol);
  w.resize(grid.size());
  return w;
}

LineField solve_cauchy(const NodeArray& phi, const Eigen::MatrixXd& source, const SampledPath& r, FractionalOrder s,
                       const LineGrid& grid, const CauchyOptions& options) {
  const TimeGrid& time = r.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto points = static_cast<Eigen::Index>(time.points());
  if (phi.size() != n || source.cols() != n || source.rows() != points) {
    throw UsageError("Cauchy data shapes do not match the line and time grids");
  }
  if (!phi.allFinite() || !source.allFinite()) throw NumericalFailure("Cauchy data contain non-finite values");
  if (std::isfinite(options.support_tol)) {
    check_support(grid, phi, phi.cwiseAbs().maxCoeff(), options.support_tol, "initial datum");
    const double sup = source.cwiseAbs().maxCoeff();
    for (Eigen::Index m = 0; m < points; ++m) {
      check_support(grid, source.row(m).transpose(), sup, options.support_tol, "source");
    }
  }

  const std::vector<double> w = propagator_weights(grid, s, time.dt());
  Eigen::MatrixXd propagator(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) propagator(i, j) = w[static_cast<std::size_t>(std::abs(i - j))];
  }

  const double half_dt = 0.5 * time.dt();
  Eigen::MatrixXd values(points, n);
  Eigen::VectorXd v = phi;
  values.row(0) = v.transpose();
  for (Eigen::Index m = 0; m + 1 < points; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    const Eigen::VectorXd pushed = v + half_dt * r[mi] * source.row(m).transpose();
    v = propagator * pushed + half_dt * r[mi + 1] * source.row(m + 1).transpose();
    values.row(m + 1) = v.transpose();
  }
  if (!values.allFinite()) throw NumericalFailure("Cauchy solution is not finite");
  return {grid, time, std::move(values)};
}

LineField solve_cauchy(const NodeArray& phi, const SpaceTimeFunction& f, const SampledPath& r, FractionalOrder s,
                       const LineGrid& grid, const CauchyOptions& options) {
  const TimeGrid& time = r.grid();
  Eigen::MatrixXd source(static_cast<Eigen::Index>(time.points()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t m = 0; m < time.points(); ++m) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      source(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = f(grid.node(i), time.at(m));
    }
  }
  return solve_cauchy(phi, source, r, s, grid, options);
}

SampledPath integrating_factor(const TimeFunction& p, const TimeGrid& grid) {
  std::vector<double> r(grid.points());
  double integral = 0.0;
  r[0] = 1.0;
  for (std::size_t m = 0; m < grid.steps(); ++m) {
    integral += GaussLegendre8::integrate(p, grid.at(m), grid.at(m + 1));
    r[m + 1] = std::exp(-integral);
  }
  return SampledPath(grid, std::move(r));
}

PairObservation observe_pair(FractionalOrder s, const NodeArray& phi, const SpaceTimeFunction& f, const TimeFunction& p,
                             double q, const LineGrid& grid, const TimeGrid& time, const CauchyOptions& options) {
  const std::size_t node = grid.nearest_node(q);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto points = static_cast<Eigen::Index>(time.points());

  Eigen::MatrixXd source(points, n);
  for (Eigen::Index m = 0; m < points; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      source(m, i) = f(grid.node(static_cast<std::size_t>(i)), time.at(static_cast<std::size_t>(m)));
    }
  }
  const Eigen::VectorXd fq = source.col(static_cast<Eigen::Index>(node));
  const double f_sup = source.cwiseAbs().maxCoeff();
  for (Eigen::Index m = 0; m < points; ++m) {
    if (fq(m) == 0.0 || std::abs(fq(m)) <= 1e-14 * f_sup) {
      throw AssumptionViolation("source nonvanishing at q",
                                "f(q, t) = 0 at t = " + std::to_string(time.at(static_cast<std::size_t>(m))));
    }
  }

  const SampledPath r = integrating_factor(p, time);
  const LineField v1 = solve_cauchy(phi, source, r, s, grid, options);

  const std::size_t padded = 4 * grid.size();
  PaddedTransform transform(padded);
  const std::vector<double> symbol = laplacian_symbol(padded, grid.h(), 2.0 * s.value());
  check_decay(phi, 1e-10);
  const NodeArray lap_phi = transform.filter(phi, symbol);
  Eigen::MatrixXd lap_source(points, n);
  for (Eigen::Index m = 0; m < points; ++m) {
    const NodeArray row = source.row(m).transpose();
    check_decay(row, 1e-10);
    lap_source.row(m) = transform.filter(row, symbol).transpose();
  }
  CauchyOptions unchecked = options;
  unchecked.support_tol = std::numeric_limits<double>::infinity();
  const LineField v2 = solve_cauchy(lap_phi, lap_source, r, s, grid, unchecked);

  std::vector<double> w1(time.points());
  std::vector<double> w2(time.points());
  const auto col = static_cast<Eigen::Index>(node);
  for (std::size_t m = 0; m < time.points(); ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    w1[m] = v1.values(row, col) / r[m];
    w2[m] = v2.values(row, col) / r[m];
  }
  return {SampledPath(time, std::move(w1)), SampledPath(time, std::move(w2)),
          SampledPath(time, std::vector<double>(fq.data(), fq.data() + fq.size())), node, grid.node(node)};
}

SampledPath recover_p_double(const SampledPath& w1, const SampledPath& w2, const SampledPath& f_at_q) {
  if (!(w1.grid() == w2.grid()) || !(w1.grid() == f_at_q.grid())) {
    throw UsageError("w1, w2 and f(q,.) must share one time grid");
  }
  const double sup = w1.sup_norm();
  for (std::size_t m = 0; m < w1.size(); ++m) {
    if (w1[m] == 0.0 || std::abs(w1[m]) <= 1e-14 * sup) {
      throw NumericalFailure("w1 vanishes at t = " + std::to_string(w1.grid().at(m)));
    }
  }
  const SampledPath dw1 = differentiate(w1);
  std::vector<double> p(w1.size());
  for (std::size_t m = 0; m < p.size(); ++m) p[m] = (dw1[m] + w2[m] - f_at_q[m]) / w1[m];
  return SampledPath(w1.grid(), std::move(p));
}

}  // namespace fracinv
