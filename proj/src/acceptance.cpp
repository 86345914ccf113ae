#include "fracinv/acceptance.hpp"

#include "fracinv/error.hpp"
#include "fracinv/forward.hpp"
#include "fracinv/freespace.hpp"
#include "fracinv/recovery.hpp"
#include "fracinv/source_recovery.hpp"
#include "fracinv/spectral.hpp"
#include "fracinv/volterra.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>

namespace fracinv::acceptance {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

DirichletSpectrum interval_spectrum(double s, std::size_t n) {
  return eigendecompose(assemble_operator(FractionalOrder(s), SpaceGrid(-1.0, 1.0, n)));
}

NodeArray random_nodes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  NodeArray v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = dist(rng);
  return v;
}

// Runs body and converts any exception into a failed result.
Result guarded(int id, const std::string& name, const std::function<Result()>& body) {
  const Stopwatch watch;
  try {
    return body();
  } catch (const std::exception& e) {
    return {id, name, false, std::string("error: ") + e.what(), watch.seconds()};
  }
}

std::vector<double> orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

}  // namespace

Result example_nonlocal(const Options&) {
  const std::string name = "weighted-datum example r(t)";
  return guarded(1, name, [&] {
    const Stopwatch watch;
    const DirichletSpectrum spectrum = interval_spectrum(0.5, 256);
    const double lambda1 = spectrum.eigenvalue(0);
    const NodeArray phi1 = spectrum.mode(0);
    const TimeGrid grid(1.0, 800);
    const NonlocalDatumProblem problem{
        spectrum, phi1,
        separable_source(spectrum.grid(), phi1, [](double t) { return 1.0 + std::sin(t) * std::sin(t); }), phi1,
        SampledPath::sample(grid, [](double t) { return 1.0 + t * t; })};
    const RecoveryResult result = recover_nonlocal(problem);

    double rel = 0.0;
    for (std::size_t m = 0; m < grid.points(); ++m) {
      const double t = grid.at(m);
      const double exact = (lambda1 + 2.0 * t + lambda1 * t * t) / (1.0 + std::sin(t) * std::sin(t));
      rel = std::max(rel, std::abs(result.r[m] - exact) / std::abs(exact));
    }
    const double start = std::abs(result.r[0] - lambda1);
    const double secs = watch.seconds();
    const bool ok = rel <= 1e-2 && start <= 1e-3 && secs <= 60.0;
    return Result{1, name, ok,
                  "sup rel err " + sci(rel) + " (tol 1e-2), |r(0)-lambda1| " + sci(start) + " (tol 1e-3), lambda1 " +
                      fixed(lambda1, 6) + ", datum residual " + sci(result.diagnostics.observation_residual),
                  secs};
  });
}

Result example_point_datum(const Options&) {
  const std::string name = "point-datum example forward consistency";
  return guarded(2, name, [&] {
    const Stopwatch watch;
    const DirichletSpectrum spectrum = interval_spectrum(0.5, 256);
    const double lambda1 = spectrum.eigenvalue(0);
    const NodeArray phi1 = spectrum.mode(0);
    const TimeGrid grid(1.0, 800);
    const double q = 0.3;
    const double phi_q = phi1(static_cast<Eigen::Index>(spectrum.grid().nearest_node(q)));
    const SingleDatumProblem problem{
        spectrum, phi1, separable_source(spectrum.grid(), phi1, [=](double t) { return std::exp(-lambda1 * t); }), q,
        SampledPath::sample(grid, [=](double t) { return std::exp(-lambda1 * t) * phi_q; })};

    const AssembledVolterra assembled = assemble_single(problem);
    double g_dev = 0.0;
    double k_dev = 0.0;
    for (std::size_t m = 0; m < grid.points(); ++m) {
      g_dev = std::max(g_dev, std::abs(assembled.volterra.g[m] - 1.0));
      for (std::size_t j = 0; j <= m; ++j) k_dev = std::max(k_dev, std::abs(assembled.volterra.kernel(m, j) - 1.0));
    }
    const RecoveryResult result = recover_single(problem);
    const double consistency = forward_consistency(problem, result);
    double p_dev = 0.0;
    for (std::size_t m = 0; m < grid.points(); ++m) p_dev = std::max(p_dev, std::abs(result.p[m] + 1.0));
    const double secs = watch.seconds();
    const bool ok = g_dev <= 1e-10 && k_dev <= 1e-10 && consistency <= 5e-3 && p_dev <= 1e-2 && secs <= 60.0;
    return Result{2, name, ok,
                  "|g-1| " + sci(g_dev) + ", |K-1| " + sci(k_dev) + " (tol 1e-10), ||u(q)-w||/||w|| " +
                      sci(consistency) + " (tol 5e-3), |p+1| " + sci(p_dev) + " (tol 1e-2)",
                  secs};
  });
}

Result double_datum(const Options&) {
  const std::string name = "double-datum recovery of p on the line";
  return guarded(3, name, [&] {
    const Stopwatch watch;
    const FractionalOrder s(0.5);
    const LineGrid line(40.0, 1024);
    const TimeGrid time(1.0, 400);
    const NodeArray phi = line.sample([](double x) { return std::exp(-x * x); });
    const SpaceTimeFunction f = [](double x, double t) {
      return (1.0 + 0.5 * std::sin(t)) * std::exp(-(x - 0.5) * (x - 0.5));
    };

    const PairObservation obs = observe_pair(s, phi, f, [](double t) { return std::sin(t); }, 0.0, line, time);
    const SampledPath p = recover_p_double(obs.w1, obs.w2, obs.f_at_q);
    double p_err = 0.0;
    for (std::size_t m = 0; m < time.points(); ++m) p_err = std::max(p_err, std::abs(p[m] - std::sin(time.at(m))));

    const PairObservation zero = observe_pair(s, phi, f, [](double) { return 0.0; }, 0.0, line, time);
    const SampledPath dw1 = differentiate(zero.w1);
    double identity = 0.0;
    for (std::size_t m = 0; m < time.points(); ++m) {
      identity = std::max(identity, std::abs(zero.w2[m] - (-dw1[m] + zero.f_at_q[m])));
    }
    const double secs = watch.seconds();
    const bool ok = p_err <= 2e-2 && identity <= 2e-3 && secs <= 180.0;
    return Result{3, name, ok,
                  "||p-sin||_inf " + sci(p_err) + " (tol 2e-2), zero-p identity " + sci(identity) + " (tol 2e-3)",
                  secs};
  });
}

Result source_roundtrip(const Options&) {
  const std::string name = "source recovery roundtrip";
  return guarded(4, name, [&] {
    const Stopwatch watch;
    const DirichletSpectrum spectrum = interval_spectrum(0.5, 128);
    const SpaceGrid& space = spectrum.grid();
    std::mt19937_64 rng(20240611);
    double worst_source = 0.0;
    double worst_ends = 0.0;
    for (const double horizon : {0.1, 1.0, 10.0}) {
      const TimeGrid grid(horizon, 10);
      for (int trial = 0; trial < 20; ++trial) {
        const NodeArray phi = random_nodes(rng, space.size());
        const NodeArray f_star = random_nodes(rng, space.size());
        worst_source = std::max(worst_source, roundtrip_check(spectrum, phi, f_star, grid));
        const NodeArray psi = solve_forward_const_source(spectrum, phi, f_star, grid).at(grid.steps());
        const SourcePair pair = recover_source(spectrum, phi, psi, grid);
        worst_ends = std::max({worst_ends, pair.initial_residual / norm_h(space, phi),
                               pair.terminal_residual / norm_h(space, psi)});
      }
    }
    const double secs = watch.seconds();
    const bool ok = worst_source <= 1e-9 && worst_ends <= 1e-9 && secs <= 10.0;
    return Result{4, name, ok,
                  "max rel source err " + sci(worst_source) + ", max endpoint residual " + sci(worst_ends) +
                      " (tol 1e-9, 60 trials)",
                  secs};
  });
}

Result weyl_law(const Options& options) {
  const std::string name = "Weyl law";
  return guarded(5, name, [&] {
    const Stopwatch watch;
    const FractionalOrder s(0.5);
    const SpaceGrid grid(-1.0, 1.0, 1024);
    std::vector<double> weights = riesz_weights(s, grid.size());
    if (options.corrupt_weights) std::fill(weights.begin() + 2, weights.end(), 0.0);
    const DirichletSpectrum spectrum = eigendecompose(OperatorMatrix::from_weights(s, grid, weights));
    bool ok = true;
    double previous = INFINITY;
    std::string measured;
    for (const std::size_t k : {10, 20, 40}) {
      const double ratio = weyl_ratio(spectrum, k);
      const double deviation = std::abs(1.0 - ratio);
      ok = ok && ratio >= 0.90 && ratio <= 1.02 && deviation < previous;
      previous = deviation;
      measured += "k=" + std::to_string(k) + ": " + fixed(ratio) + " ";
    }
    measured += "(band [0.90, 1.02], deviation decreasing)";
    return Result{5, name, ok, measured, watch.seconds()};
  });
}

Result kernel_accuracy(const Options&) {
  const std::string name = "heat kernel accuracy and mass";
  return guarded(6, name, [&] {
    const Stopwatch watch;
    double poisson = 0.0;
    for (const double t : {0.5, 1.0, 2.0}) {
      for (int i = 0; i <= 200; ++i) {
        const double x = -5.0 + 0.05 * i;
        const double exact = t / (std::numbers::pi * (t * t + x * x));
        poisson = std::max(poisson, std::abs(heat_kernel(x, t, FractionalOrder(0.5)) - exact));
      }
    }
    double mass = 0.0;
    for (const double s : {0.4, 0.5, 0.75}) mass = std::max(mass, std::abs(kernel_mass(FractionalOrder(s), 1.0) - 1.0));
    const bool ok = poisson <= 1e-6 && mass <= 1e-5;
    return Result{6, name, ok,
                  "Poisson max abs err " + sci(poisson) + " (tol 1e-6), |mass-1| " + sci(mass) + " (tol 1e-5)",
                  watch.seconds()};
  });
}

Result convergence_orders(const Options&) {
  const std::string name = "temporal convergence orders";
  return guarded(7, name, [&] {
    const Stopwatch watch;
    const std::array<std::size_t, 4> steps{100, 200, 400, 800};

    std::vector<double> volterra_err;
    for (const std::size_t m : steps) {
      const TimeGrid grid(1.0, m);
      const VolterraProblem problem =
          VolterraProblem::from_continuous(SampledPath::sample(grid, [](double) { return 1.0; }),
                                           [](double, double) { return 1.0; });
      const SampledPath r = solve_second_kind(problem);
      double err = 0.0;
      for (std::size_t k = 0; k < grid.points(); ++k) err = std::max(err, std::abs(r[k] - std::exp(grid.at(k))));
      volterra_err.push_back(err);
    }

    const DirichletSpectrum spectrum = interval_spectrum(0.5, 64);
    const double lambda1 = spectrum.eigenvalue(0);
    const double c = 0.3;
    const NodeArray phi1 = spectrum.mode(0);
    const SpaceTimeFunction f = separable_source(
        spectrum.grid(), phi1, [=](double t) { return -std::sin(t) + (lambda1 - c) * std::cos(t); });
    std::vector<double> forward_err;
    for (const std::size_t m : steps) {
      const TimeGrid grid(1.0, m);
      const StateField u = solve_forward(spectrum, phi1, f, [=](double) { return c; }, grid);
      double err = 0.0;
      for (std::size_t k = 0; k < grid.points(); ++k) {
        err = std::max(err, std::abs(u.modes()(static_cast<Eigen::Index>(k), 0) - std::cos(grid.at(k))));
      }
      forward_err.push_back(err);
    }

    bool ok = true;
    std::string measured = "Volterra orders";
    for (const double o : orders(volterra_err)) {
      ok = ok && o >= 1.8 && o <= 2.2;
      measured += " " + fixed(o, 3);
    }
    measured += ", forward orders";
    for (const double o : orders(forward_err)) {
      ok = ok && o >= 1.8 && o <= 2.2;
      measured += " " + fixed(o, 3);
    }
    measured += " (band [1.8, 2.2])";
    return Result{7, name, ok, measured, watch.seconds()};
  });
}

Result property_suites(const Options&) {
  const std::string name = "property suites";
  return guarded(8, name, [&] {
    const Stopwatch watch;
    const DirichletSpectrum spectrum = interval_spectrum(0.5, 256);
    const SpaceGrid& space = spectrum.grid();
    const OperatorMatrix& op = spectrum.op();
    std::mt19937_64 rng(7);

    double symmetry = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const NodeArray u = random_nodes(rng, space.size());
      const NodeArray v = random_nodes(rng, space.size());
      const NodeArray au = op.apply(u);
      const NodeArray av = op.apply(v);
      const double scale = norm_h(space, au) * norm_h(space, v) + norm_h(space, u) * norm_h(space, av);
      symmetry = std::max(symmetry, std::abs(inner_h(space, au, v) - inner_h(space, u, av)) / scale);
    }

    const Eigen::MatrixXd& vectors = spectrum.eigenvectors();
    const Eigen::MatrixXd gram = space.h() * vectors.transpose() * vectors;
    const double ortho =
        (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();

    const TimeGrid grid(1.0, 50);
    const double lambda1 = spectrum.eigenvalue(0);
    bool energy_ok = true;
    double energy_ratio = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const NodeArray phi = random_nodes(rng, space.size());
      const StateField u = solve_forward(spectrum, phi, [](double, double) { return 0.0; }, [](double) { return 0.0; },
                                         grid);
      const double initial = norm_h(space, phi);
      for (std::size_t m = 0; m < grid.points(); ++m) {
        const double bound = std::exp(-lambda1 * grid.at(m)) * initial;
        const double norm = norm_h(space, u.at(m));
        energy_ok = energy_ok && norm <= bound * (1.0 + 1e-12);
        energy_ratio = std::max(energy_ratio, norm / bound);
      }
    }

    int bound_holds = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd coeffs = random_nodes(rng, space.size());
      if (weighted_sum_bound(spectrum, coeffs, 2).holds()) ++bound_holds;
    }

    const bool ok = symmetry <= 1e-12 && ortho <= 1e-10 && energy_ok && bound_holds == 50;
    return Result{8, name, ok,
                  "IBP asymmetry " + sci(symmetry) + " (tol 1e-12), orthonormality " + sci(ortho) +
                      " (tol 1e-10), energy bound " + (energy_ok ? "holds" : "violated") + " (max ||u||/bound " +
                      fixed(energy_ratio, 15) + "), weighted-sum bound " + std::to_string(bound_holds) + "/50",
                  watch.seconds()};
  });
}

std::string format_line(const Result& result) {
  std::ostringstream os;
  os << "criterion " << result.id << " " << (result.passed ? "PASS" : "FAIL") << " " << result.name << ": "
     << result.measured << " [" << fixed(result.seconds, 2) << " s]";
  return os.str();
}

std::vector<Result> run_all(const Options& options, std::ostream& out) {
  const std::array<Result (*)(const Options&), 8> criteria{example_nonlocal, example_point_datum, double_datum,
                                                          source_roundtrip, weyl_law,           kernel_accuracy,
                                                          convergence_orders, property_suites};
  std::vector<Result> results;
  for (auto* criterion : criteria) {
    results.push_back(criterion(options));
    out << format_line(results.back()) << std::endl;
  }
  return results;
}

}  // namespace fracinv::acceptance
