#include "fracinv/recovery.hpp"

#include "fracinv/error.hpp"
#include "fracinv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace fracinv {

namespace {

std::size_t modes_kept(const DirichletSpectrum& spectrum, std::size_t limit) {
  return limit == 0 ? spectrum.size() : std::min(limit, spectrum.size());
}

// ET(k, m) = exp(-λ_k m Δτ).
Eigen::MatrixXd decay_table(const DirichletSpectrum& spectrum, std::size_t modes, const TimeGrid& grid) {
  Eigen::MatrixXd table(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(grid.points()));
  for (std::size_t m = 0; m < grid.points(); ++m) {
    const double t = grid.at(m);
    for (std::size_t k = 0; k < modes; ++k) {
      table(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = std::exp(-spectrum.eigenvalue(k) * t);
    }
  }
  return table;
}

// K(m, j) = Σ_k c_k f_k(τ_j) E_k[m - j] / d_m for j ≤ m.
std::shared_ptr<const Eigen::MatrixXd> kernel_table(const Eigen::VectorXd& weights, const Eigen::MatrixXd& source_modes,
                                                    const Eigen::MatrixXd& decay, const std::vector<double>& denom) {
  const auto modes = weights.size();
  const auto points = decay.cols();
  const Eigen::MatrixXd weighted =
      weights.asDiagonal() * source_modes.leftCols(modes).transpose();  // modes × points
  auto table = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(points, points));
  parallel::parallel_for(static_cast<std::size_t>(points), [&](std::size_t mm) {
    const auto m = static_cast<Eigen::Index>(mm);
    for (Eigen::Index j = 0; j <= m; ++j) {
      (*table)(m, j) = weighted.col(j).dot(decay.col(m - j)) / denom[mm];
    }
  });
  return table;
}

KernelEvaluator table_evaluator(std::shared_ptr<const Eigen::MatrixXd> table) {
  return [table = std::move(table)](std::size_t m, std::size_t j) {
    return (*table)(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j));
  };
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void record(AssumptionReport& report, const std::string& name, bool ok, const std::string& detail) {
  report.checks.push_back({name, ok, detail});
}

}  // namespace

AssembledVolterra assemble_single(const SingleDatumProblem& problem) {
  const DirichletSpectrum& spectrum = problem.spectrum;
  const TimeGrid& grid = problem.w.grid();
  const SpaceGrid& space = spectrum.grid();
  if (static_cast<std::size_t>(problem.phi.size()) != space.size()) {
    throw UsageError("initial datum length does not match the grid");
  }
  const std::size_t node = space.nearest_node(problem.q);
  const std::size_t modes = modes_kept(spectrum, problem.mode_limit);
  const auto km = static_cast<Eigen::Index>(modes);
  const SampledPath& w = problem.w;

  AssumptionReport report;

  const double w_sup = w.sup_norm();
  for (std::size_t m = 0; m < w.size(); ++m) {
    if (w[m] == 0.0 || std::abs(w[m]) < 1e-14 * w_sup) {
      throw AssumptionViolation("(iii)", "datum w vanishes at t = " + format(grid.at(m)));
    }
  }
  const double phi_q = problem.phi(static_cast<Eigen::Index>(node));
  const double mismatch = std::abs(w[0] - phi_q);
  const bool compatible = mismatch <= problem.compat_tol * std::max(1.0, std::abs(phi_q));
  record(report, "(iii)", compatible, "|w(0) - phi(q)| = " + format(mismatch));
  if (!compatible) {
    throw AssumptionViolation("(iii)", "w(0) = " + format(w[0]) + " but phi(q) = " + format(phi_q));
  }

  const Eigen::VectorXd phi_modes = project(problem.phi, spectrum);
  const Eigen::VectorXd at_q = spectrum.eigenvectors().row(static_cast<Eigen::Index>(node)).transpose();

  const Eigen::VectorXd products = phi_modes.head(km).cwiseProduct(at_q.head(km));
  const double scale = products.cwiseAbs().maxCoeff();
  const bool some_positive = products.maxCoeff() > 1e-12 * scale && scale > 0.0;
  Eigen::Index worst = 0;
  const double most_negative = products.minCoeff(&worst);
  const bool all_nonnegative = most_negative >= -1e-10 * scale;
  record(report, "(i)", some_positive && all_nonnegative,
         "min phi_k phi_k(q) = " + format(most_negative) + ", max = " + format(products.maxCoeff()));
  if (!some_positive) throw AssumptionViolation("(i)", "phi_k phi_k(q) > 0 fails for every mode");
  if (!all_nonnegative) {
    throw AssumptionViolation("(i)", "phi_k phi_k(q) = " + format(most_negative) + " < 0 for k = " +
                                         std::to_string(worst + 1));
  }

  Eigen::MatrixXd source_modes = modal_source(spectrum, problem.f, grid);
  const double f_scale = source_modes.cwiseAbs().maxCoeff();
  std::size_t vanishing = 0;
  std::size_t first_vanishing = 0;
  for (Eigen::Index k = 0; k < km; ++k) {
    if (std::abs(at_q(k)) <= 1e-8) continue;
    if (source_modes.col(k).cwiseAbs().minCoeff() <= 1e-12 * f_scale) {
      if (vanishing++ == 0) first_vanishing = static_cast<std::size_t>(k) + 1;
    }
  }
  record(report, "(ii)", vanishing == 0, std::to_string(vanishing) + " modes with f_k(t) phi_k(q) = 0");
  if (vanishing > 0) {
    report.warnings.push_back("assumption (ii): f_k(t) phi_k(q) vanishes for " + std::to_string(vanishing) +
                              " modes (first k = " + std::to_string(first_vanishing) + ")");
  }

  const Eigen::MatrixXd decay = decay_table(spectrum, modes, grid);
  const Eigen::VectorXd weighted_phi = phi_modes.head(km).cwiseProduct(at_q.head(km));
  std::vector<double> g(grid.points());
  for (std::size_t m = 0; m < g.size(); ++m) {
    g[m] = weighted_phi.dot(decay.col(static_cast<Eigen::Index>(m))) / w[m];
  }
  auto table = kernel_table(at_q.head(km), source_modes, decay, w.values());

  return {VolterraProblem{SampledPath(grid, std::move(g)), table_evaluator(table)},
          std::move(source_modes),
          phi_modes,
          table,
          modes,
          node,
          std::move(report)};
}

AssembledVolterra assemble_nonlocal(const NonlocalDatumProblem& problem) {
  const DirichletSpectrum& spectrum = problem.spectrum;
  const TimeGrid& grid = problem.w.grid();
  const SpaceGrid& space = spectrum.grid();
  if (static_cast<std::size_t>(problem.phi.size()) != space.size() ||
      static_cast<std::size_t>(problem.omega.size()) != space.size()) {
    throw UsageError("initial datum or weight length does not match the grid");
  }
  const std::size_t modes = modes_kept(spectrum, problem.mode_limit);
  const auto km = static_cast<Eigen::Index>(modes);
  AssumptionReport report;

  const Eigen::VectorXd phi_modes = project(problem.phi, spectrum);
  const Eigen::VectorXd omega_modes = project(problem.omega, spectrum);
  Eigen::MatrixXd source_modes = modal_source(spectrum, problem.f, grid);

  const double omega_norm = norm_h(space, problem.omega);
  const Eigen::VectorXd denom_vec = source_modes * omega_modes;
  std::vector<double> denom(grid.points());
  double smallest = INFINITY;
  for (std::size_t m = 0; m < denom.size(); ++m) {
    const auto r = static_cast<Eigen::Index>(m);
    denom[m] = denom_vec(r);
    const double f_norm = source_modes.row(r).norm();
    smallest = std::min(smallest, std::abs(denom[m]));
    if (denom[m] == 0.0 || std::abs(denom[m]) <= 1e-12 * omega_norm * f_norm) {
      throw AssumptionViolation("weight-source nondegeneracy",
                                "(omega, f(., t)) vanishes at t = " + format(grid.at(m)));
    }
  }
  record(report, "weight-source nondegeneracy", true, "min |(omega, f)| = " + format(smallest));

  const double expected = omega_modes.dot(phi_modes);
  const double mismatch = std::abs(problem.w[0] - expected);
  const bool compatible = mismatch <= problem.compat_tol;
  record(report, "weighted compatibility", compatible, "|w(0) - (omega, phi)| = " + format(mismatch));
  if (!compatible) {
    throw AssumptionViolation("weighted compatibility",
                              "w(0) = " + format(problem.w[0]) + " but (omega, phi) = " + format(expected));
  }

  const Eigen::MatrixXd decay = decay_table(spectrum, modes, grid);
  const Eigen::VectorXd lambda_omega = spectrum.eigenvalues().head(km).cwiseProduct(omega_modes.head(km));
  const Eigen::VectorXd weighted_phi = lambda_omega.cwiseProduct(phi_modes.head(km));
  const SampledPath dw = differentiate(problem.w);
  std::vector<double> g(grid.points());
  for (std::size_t m = 0; m < g.size(); ++m) {
    g[m] = (dw[m] + weighted_phi.dot(decay.col(static_cast<Eigen::Index>(m)))) / denom[m];
  }
  auto table = kernel_table(lambda_omega, source_modes, decay, denom);

  return {VolterraProblem{SampledPath(grid, std::move(g)), table_evaluator(table)},
          std::move(source_modes),
          phi_modes,
          table,
          modes,
          std::nullopt,
          std::move(report)};
}

RecoveryResult recover_single(const SingleDatumProblem& problem) {
  AssembledVolterra assembled = assemble_single(problem);
  const DirichletSpectrum& spectrum = problem.spectrum;
  const TimeGrid& grid = problem.w.grid();
  const SampledPath r = solve_second_kind(assembled.volterra);
  const SampledPath p = log_derivative_coefficient(r);

  // u_k(τ_m) = [φ_k e^(-λ_k τ_m) + ∫_0^τ_m f_k r e^(-λ_k(τ_m - τ)) dτ] / r(τ_m)
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  const auto points = static_cast<Eigen::Index>(grid.points());
  const double dt = grid.dt();
  Eigen::MatrixXd modes(points, n);
  parallel::parallel_for(static_cast<std::size_t>(n), [&](std::size_t kk) {
    const auto k = static_cast<Eigen::Index>(kk);
    const double lambda = spectrum.eigenvalue(kk);
    const double step = std::exp(-lambda * dt);
    double integral = 0.0;
    modes(0, k) = assembled.phi_modes(k);
    for (Eigen::Index m = 1; m < points; ++m) {
      const auto mi = static_cast<std::size_t>(m);
      integral = step * integral + 0.5 * dt *
                                       (assembled.source_modes(m, k) * r[mi] +
                                        step * assembled.source_modes(m - 1, k) * r[mi - 1]);
      modes(m, k) = (assembled.phi_modes(k) * std::exp(-lambda * grid.at(mi)) + integral) / r[mi];
    }
  });
  StateField u(spectrum, grid, std::move(modes));

  const PointObservation observed = observe_point(u, problem.q);
  RecoveryDiagnostics diag{assembled.node, observed.snapped_x, sup_distance(observed.path, problem.w),
                           weak_residual(u, p, assembled.source_modes), std::move(assembled.assumptions)};
  return {r, p, std::move(u), std::move(diag)};
}

RecoveryResult recover_nonlocal(const NonlocalDatumProblem& problem) {
  AssembledVolterra assembled = assemble_nonlocal(problem);
  const TimeGrid& grid = problem.w.grid();
  const SampledPath r = solve_second_kind(assembled.volterra);

  Eigen::MatrixXd effective = assembled.source_modes;
  for (std::size_t m = 0; m < grid.points(); ++m) effective.row(static_cast<Eigen::Index>(m)) *= r[m];
  const SampledPath zero = SampledPath::zeros(grid);
  StateField u = solve_forward_modal(problem.spectrum, problem.phi, effective, zero);

  const SampledPath observed = observe_weighted(u, problem.omega);
  RecoveryDiagnostics diag{std::nullopt, std::nullopt, sup_distance(observed, problem.w),
                           weak_residual(u, zero, effective), std::move(assembled.assumptions)};
  return {r, zero, std::move(u), std::move(diag)};
}

double forward_consistency(const SingleDatumProblem& problem, const RecoveryResult& result) {
  const StateField u = solve_forward(problem.spectrum, problem.phi, problem.f, result.p.as_function(),
                                     problem.w.grid());
  return sup_distance(observe_point(u, problem.q).path, problem.w) / problem.w.sup_norm();
}

double forward_consistency(const NonlocalDatumProblem& problem, const RecoveryResult& result) {
  const TimeGrid& grid = problem.w.grid();
  Eigen::MatrixXd effective = modal_source(problem.spectrum, problem.f, grid);
  for (std::size_t m = 0; m < grid.points(); ++m) effective.row(static_cast<Eigen::Index>(m)) *= result.r[m];
  const StateField u = solve_forward_modal(problem.spectrum, problem.phi, effective, SampledPath::zeros(grid));
  return sup_distance(observe_weighted(u, problem.omega), problem.w) / problem.w.sup_norm();
}

}  // namespace fracinv
