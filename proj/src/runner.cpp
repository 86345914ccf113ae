#include "fracinv/runner.hpp"

#include "fracinv/acceptance.hpp"
#include "fracinv/csv.hpp"
#include "fracinv/error.hpp"
#include "fracinv/forward.hpp"
#include "fracinv/freespace.hpp"
#include "fracinv/recovery.hpp"
#include "fracinv/source_recovery.hpp"
#include "fracinv/spectral.hpp"
#include "fracinv/volterra.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace fracinv {

using nlohmann::json;

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const AssumptionViolation*>(&error)) return exit_assumption;
  if (dynamic_cast<const UsageError*>(&error)) return exit_usage;
  if (dynamic_cast<const json::exception*>(&error)) return exit_usage;
  return exit_numerical;
}

namespace {

namespace fs = std::filesystem;

class Phases {
 public:
  template <class F>
  auto time(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      timings_[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      finish();
    } else {
      auto result = body();
      finish();
      return result;
    }
  }
  json to_json() const { return json(timings_); }

 private:
  std::map<std::string, double> timings_;
};

json checks_to_json(const AssumptionReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"satisfied", c.satisfied}, {"detail", c.detail}});
  }
  return {{"checks", checks}, {"warnings", report.warnings}};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> grid_times(const TimeGrid& grid) {
  std::vector<double> t(grid.points());
  for (std::size_t m = 0; m < t.size(); ++m) t[m] = grid.at(m);
  return t;
}

// Evaluates data against a set of nodes. locate maps a node coordinate back
// to its index.
struct NodeSet {
  NodeArray x;
  std::function<std::size_t(double)> locate;
};

class Context {
 public:
  Context(const RunConfig& cfg, fs::path out, Phases& phases) : cfg_(cfg), out_(std::move(out)), phases_(phases) {}

  const RunConfig& cfg() const { return cfg_; }
  Phases& phases() { return phases_; }
  json& report() { return report_; }

  void set_lambda1(double lambda1) { lambda1_ = lambda1; }
  void set_spectrum(const DirichletSpectrum& spectrum) { spectrum_ = spectrum; }

  expr::Bindings bindings() const {
    expr::Bindings b;
    b.lambda1 = lambda1_;
    return b;
  }

  NodeArray spatial(const DataSpec& spec, const NodeSet& nodes, const char* field) const {
    const auto n = nodes.x.size();
    switch (spec.kind) {
      case DataSpec::Kind::expression: {
        NodeArray v(n);
        expr::Bindings b = bindings();
        for (Eigen::Index i = 0; i < n; ++i) {
          b.x = nodes.x(i);
          v(i) = spec.expression->evaluate(b);
        }
        return v;
      }
      case DataSpec::Kind::eigenfunction: return eigenfunction(spec, field);
      case DataSpec::Kind::csv: {
        const csv::Table table = csv::read(spec.csv);
        if (table.header.size() != 2 || table.header[0] != "x") {
          throw UsageError(std::string(field) + ": CSV must have the columns x,<value>");
        }
        check_nodes(table, nodes, field);
        NodeArray v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = table.rows[static_cast<std::size_t>(i)][1];
        return v;
      }
    }
    throw UsageError(std::string(field) + ": unsupported data form");
  }

  SpaceTimeFunction space_time(const DataSpec& spec, const NodeSet& nodes, const char* field) const {
    switch (spec.kind) {
      case DataSpec::Kind::expression:
        return [e = *spec.expression, b = bindings()](double x, double t) mutable {
          b.x = x;
          b.t = t;
          return e.evaluate(b);
        };
      case DataSpec::Kind::eigenfunction: {
        TimeFunction g = [](double) { return 1.0; };
        if (spec.time_factor) g = time_function(*spec.time_factor);
        return separable_source(spectrum_->grid(), eigenfunction(spec, field), g);
      }
      case DataSpec::Kind::csv: {
        const csv::Table table = csv::read(spec.csv);
        if (table.header.size() == 2) {
          const NodeArray profile = spatial(spec, nodes, field);
          return [profile, locate = nodes.locate](double x, double) {
            return profile(static_cast<Eigen::Index>(locate(x)));
          };
        }
        return tabulated(table, nodes, field);
      }
    }
    throw UsageError(std::string(field) + ": unsupported data form");
  }

  TimeFunction time_function(const expr::Expr& e) const {
    return [e, b = bindings()](double t) mutable {
      b.t = t;
      return e.evaluate(b);
    };
  }

  SampledPath path(const DataSpec& spec, const TimeGrid& grid, const char* field) const {
    if (spec.kind == DataSpec::Kind::csv) {
      const csv::Table table = csv::read(spec.csv);
      if (table.header.size() != 2 || table.header[0] != "t") {
        throw UsageError(std::string(field) + ": CSV must have the columns t,value");
      }
      if (table.rows.size() != grid.points()) {
        throw UsageError(std::string(field) + ": CSV has " + std::to_string(table.rows.size()) +
                         " rows, the time grid has " + std::to_string(grid.points()) + " points");
      }
      std::vector<double> values(grid.points());
      for (std::size_t m = 0; m < values.size(); ++m) {
        if (std::abs(table.rows[m][0] - grid.at(m)) > 1e-9 * (1.0 + grid.horizon())) {
          throw UsageError(std::string(field) + ": CSV time " + csv::format_number(table.rows[m][0]) +
                           " does not match the grid time " + csv::format_number(grid.at(m)));
        }
        values[m] = table.rows[m][1];
      }
      return SampledPath(grid, std::move(values));
    }
    if (!spec.expression) throw UsageError(std::string(field) + ": expected an expression or CSV file");
    return SampledPath::sample(grid, time_function(*spec.expression));
  }

  TimeFunction time_data(const DataSpec& spec, const TimeGrid& grid, const char* field) const {
    if (spec.kind == DataSpec::Kind::csv) return path(spec, grid, field).as_function();
    return time_function(*spec.expression);
  }

  fs::path write(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& columns) {
    const fs::path path = out_ / name;
    phases_.time("write", [&] { csv::write(path, header, columns); });
    report_["outputs"].push_back(name);
    return path;
  }

  void write_path(const std::string& name, const SampledPath& path) {
    write(name, {"t", "value"}, {grid_times(path.grid()), path.values()});
  }

  void write_field(const std::string& name, const NodeArray& x, const TimeGrid& grid, const Eigen::MatrixXd& values) {
    std::vector<double> xs;
    std::vector<double> ts;
    std::vector<double> us;
    const auto n = x.size();
    for (std::size_t m = 0; m < grid.points(); ++m) {
      for (Eigen::Index i = 0; i < n; ++i) {
        xs.push_back(x(i));
        ts.push_back(grid.at(m));
        us.push_back(values(static_cast<Eigen::Index>(m), i));
      }
    }
    write(name, {"x", "t", "u"}, {xs, ts, us});
  }

 private:
  NodeArray eigenfunction(const DataSpec& spec, const char* field) const {
    if (!spectrum_) throw UsageError(std::string(field) + ": eigenfunctions need an interval problem");
    if (spec.eigenfunction > spectrum_->size()) {
      throw UsageError(std::string(field) + ": eigenfunction " + std::to_string(spec.eigenfunction) +
                       " exceeds the " + std::to_string(spectrum_->size()) + " discrete modes");
    }
    return spectrum_->mode(spec.eigenfunction - 1);
  }

  static void check_nodes(const csv::Table& table, const NodeSet& nodes, const char* field) {
    if (table.rows.size() != static_cast<std::size_t>(nodes.x.size())) {
      throw UsageError(std::string(field) + ": CSV has " + std::to_string(table.rows.size()) + " rows, the grid has " +
                       std::to_string(nodes.x.size()) + " nodes");
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const double x = nodes.x(static_cast<Eigen::Index>(i));
      if (std::abs(table.rows[i][0] - x) > 1e-9 * (1.0 + std::abs(x))) {
        throw UsageError(std::string(field) + ": CSV row " + std::to_string(i + 1) + " has x = " +
                         csv::format_number(table.rows[i][0]) + ", expected node " + csv::format_number(x));
      }
    }
  }

  // Long-format x,t,<value> table on the nodes, linear in t between the
  // tabulated times and constant beyond them.
  static SpaceTimeFunction tabulated(const csv::Table& table, const NodeSet& nodes, const char* field) {
    if (table.header.size() != 3 || table.header[0] != "x" || table.header[1] != "t") {
      throw UsageError(std::string(field) + ": CSV must have the columns x,<value> or x,t,<value>");
    }
    const auto n = static_cast<std::size_t>(nodes.x.size());
    if (table.rows.empty() || table.rows.size() % n != 0) {
      throw UsageError(std::string(field) + ": CSV rows must cover every node at each time");
    }
    const std::size_t times = table.rows.size() / n;
    std::vector<double> t(times);
    Eigen::MatrixXd values(static_cast<Eigen::Index>(times), static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < times; ++m) {
      t[m] = table.rows[m * n][1];
      if (m > 0 && !(t[m] > t[m - 1])) throw UsageError(std::string(field) + ": CSV times must increase");
      for (std::size_t i = 0; i < n; ++i) {
        const auto& row = table.rows[m * n + i];
        const double x = nodes.x(static_cast<Eigen::Index>(i));
        if (row[1] != t[m] || std::abs(row[0] - x) > 1e-9 * (1.0 + std::abs(x))) {
          throw UsageError(std::string(field) + ": CSV block at t = " + csv::format_number(t[m]) +
                           " does not list the nodes in order");
        }
        values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = row[2];
      }
    }
    return [t, values, locate = nodes.locate](double x, double time) {
      const auto i = static_cast<Eigen::Index>(locate(x));
      if (time <= t.front()) return values(0, i);
      if (time >= t.back()) return values(static_cast<Eigen::Index>(t.size() - 1), i);
      const auto hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), time) - t.begin());
      const double frac = (time - t[hi - 1]) / (t[hi] - t[hi - 1]);
      return (1.0 - frac) * values(static_cast<Eigen::Index>(hi - 1), i) +
             frac * values(static_cast<Eigen::Index>(hi), i);
    };
  }

  const RunConfig& cfg_;
  fs::path out_;
  Phases& phases_;
  json report_ = {{"outputs", json::array()}};
  std::optional<double> lambda1_;
  std::optional<DirichletSpectrum> spectrum_;
};

json describe(const std::optional<DataSpec>& spec) { return spec ? json(spec->describe()) : json(nullptr); }

DirichletSpectrum build_spectrum(Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  DirichletSpectrum spectrum = ctx.phases().time("spectrum", [&] {
    return eigendecompose(assemble_operator(FractionalOrder(cfg.s), SpaceGrid(cfg.a, cfg.b, cfg.n)));
  });
  ctx.set_lambda1(spectrum.eigenvalue(0));
  ctx.set_spectrum(spectrum);
  json& params = ctx.report()["parameters"];
  params["lambda1"] = spectrum.eigenvalue(0);
  params["domain"] = {cfg.a, cfg.b};
  params["n"] = cfg.n;
  params["h"] = spectrum.grid().h();
  return spectrum;
}

NodeSet interval_nodes(const DirichletSpectrum& spectrum) {
  const SpaceGrid grid = spectrum.grid();
  return {grid.nodes(), [grid](double x) { return grid.nearest_node(x); }};
}

void record_observation(Context& ctx, double q, std::size_t node, double snapped) {
  ctx.report()["observation"] = {{"q", q}, {"node", node}, {"snapped_q", snapped}};
}

void run_spectrum(Context& ctx) {
  const DirichletSpectrum spectrum = build_spectrum(ctx);
  std::vector<double> k(spectrum.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i + 1);
  ctx.write("spectrum.csv", {"k", "lambda"}, {k, to_vector(spectrum.eigenvalues())});
  json weyl = json::object();
  for (const std::size_t idx : {1, 5, 10, 20, 40}) {
    if (idx <= spectrum.size()) weyl[std::to_string(idx)] = weyl_ratio(spectrum, idx);
  }
  ctx.report()["weyl_ratios"] = weyl;
  ctx.report()["residual"] = nullptr;
}

void run_forward(Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  const DirichletSpectrum spectrum = build_spectrum(ctx);
  const NodeSet nodes = interval_nodes(spectrum);
  const TimeGrid grid(cfg.horizon, cfg.steps);
  const NodeArray phi = ctx.spatial(*cfg.phi, nodes, "phi");
  const SpaceTimeFunction f =
      cfg.f ? ctx.space_time(*cfg.f, nodes, "f") : SpaceTimeFunction([](double, double) { return 0.0; });
  const SampledPath p = cfg.p ? SampledPath::sample(grid, ctx.time_data(*cfg.p, grid, "p")) : SampledPath::zeros(grid);

  const Eigen::MatrixXd source = ctx.phases().time("assemble", [&] { return modal_source(spectrum, f, grid); });
  const StateField u = ctx.phases().time("solve", [&] { return solve_forward_modal(spectrum, phi, source, p); });
  const double residual = weak_residual(u, p, source);
  ctx.write_field("field.csv", nodes.x, grid, u.node_values());
  if (cfg.q) {
    const PointObservation obs = observe_point(u, *cfg.q);
    record_observation(ctx, *cfg.q, obs.node, obs.snapped_x);
    ctx.write_path("observation.csv", obs.path);
  }
  if (cfg.omega) ctx.write_path("weighted.csv", observe_weighted(u, ctx.spatial(*cfg.omega, nodes, "omega")));
  ctx.report()["residuals"] = {{"weak", residual}};
  ctx.report()["residual"] = residual;
}

void run_invert_single(Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  const DirichletSpectrum spectrum = build_spectrum(ctx);
  const NodeSet nodes = interval_nodes(spectrum);
  const TimeGrid grid(cfg.horizon, cfg.steps);
  const NodeArray phi = ctx.spatial(*cfg.phi, nodes, "phi");
  const SpaceTimeFunction f = ctx.space_time(*cfg.f, nodes, "f");
  const std::size_t node = spectrum.grid().nearest_node(*cfg.q);

  std::optional<SampledPath> truth;
  SampledPath w = ctx.phases().time("datum", [&] {
    if (cfg.w->from_coefficient) {
      truth = SampledPath::sample(grid, ctx.time_function(*cfg.w->from_coefficient));
      return observe_point(solve_forward(spectrum, phi, f, truth->as_function(), grid), *cfg.q).path;
    }
    SampledPath path = ctx.path(*cfg.w, grid, "w");
    if (cfg.w->scale_by_phi_at_q) {
      std::vector<double> scaled = path.values();
      for (double& v : scaled) v *= phi(static_cast<Eigen::Index>(node));
      path = SampledPath(grid, std::move(scaled));
    }
    return path;
  });

  const SingleDatumProblem problem{spectrum, phi, f, *cfg.q, w, cfg.compat_tol, cfg.modes};
  const RecoveryResult result = ctx.phases().time("recover", [&] { return recover_single(problem); });
  const double consistency = ctx.phases().time("consistency", [&] { return forward_consistency(problem, result); });

  record_observation(ctx, *cfg.q, *result.diagnostics.node, *result.diagnostics.snapped_q);
  ctx.write("coefficient.csv", {"t", "r", "p"}, {grid_times(grid), result.r.values(), result.p.values()});
  ctx.write_field("field.csv", nodes.x, grid, result.u.node_values());
  ctx.report()["assumptions"] = checks_to_json(result.diagnostics.assumptions);
  json residuals = {{"observation", result.diagnostics.observation_residual},
                    {"weak", result.diagnostics.weak_residual},
                    {"forward_consistency", consistency}};
  if (truth) residuals["coefficient_error"] = sup_distance(result.p, *truth);
  ctx.report()["residuals"] = residuals;
  ctx.report()["residual"] = consistency;
}

void run_invert_nonlocal(Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  const DirichletSpectrum spectrum = build_spectrum(ctx);
  const NodeSet nodes = interval_nodes(spectrum);
  const TimeGrid grid(cfg.horizon, cfg.steps);
  const NodeArray phi = ctx.spatial(*cfg.phi, nodes, "phi");
  const NodeArray omega = ctx.spatial(*cfg.omega, nodes, "omega");
  const SpaceTimeFunction f = ctx.space_time(*cfg.f, nodes, "f");

  std::optional<SampledPath> truth;
  const SampledPath w = ctx.phases().time("datum", [&] {
    if (cfg.w->from_coefficient) {
      truth = SampledPath::sample(grid, ctx.time_function(*cfg.w->from_coefficient));
      Eigen::MatrixXd effective = modal_source(spectrum, f, grid);
      for (std::size_t m = 0; m < grid.points(); ++m) effective.row(static_cast<Eigen::Index>(m)) *= (*truth)[m];
      return observe_weighted(solve_forward_modal(spectrum, phi, effective, SampledPath::zeros(grid)), omega);
    }
    return ctx.path(*cfg.w, grid, "w");
  });

  const NonlocalDatumProblem problem{spectrum, phi, f, omega, w, cfg.compat_tol, cfg.modes};
  const RecoveryResult result = ctx.phases().time("recover", [&] { return recover_nonlocal(problem); });
  const double consistency = ctx.phases().time("consistency", [&] { return forward_consistency(problem, result); });

  ctx.write_path("r.csv", result.r);
  ctx.write_field("field.csv", nodes.x, grid, result.u.node_values());
  ctx.report()["assumptions"] = checks_to_json(result.diagnostics.assumptions);
  json residuals = {{"observation", result.diagnostics.observation_residual},
                    {"weak", result.diagnostics.weak_residual},
                    {"forward_consistency", consistency}};
  if (truth) residuals["coefficient_error"] = sup_distance(result.r, *truth);
  ctx.report()["residuals"] = residuals;
  ctx.report()["residual"] = consistency;
}

void run_invert_double(Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  const LineGrid line(cfg.half_width, cfg.line_nodes);
  const NodeSet nodes{line.nodes(), [line](double x) { return line.nearest_node(x); }};
  const TimeGrid grid(cfg.horizon, cfg.steps);
  const FractionalOrder s(cfg.s);
  const NodeArray phi = ctx.spatial(*cfg.phi, nodes, "phi");
  const SpaceTimeFunction f = ctx.space_time(*cfg.f, nodes, "f");
  json& params = ctx.report()["parameters"];
  params["L"] = cfg.half_width;
  params["N"] = cfg.line_nodes;
  params["h"] = line.h();

  SampledPath w1 = SampledPath::zeros(grid);
  SampledPath w2 = SampledPath::zeros(grid);
  std::vector<double> fq(grid.points());
  const std::size_t node = line.nearest_node(*cfg.q);
  std::optional<SampledPath> truth;
  if (cfg.w1) {
    w1 = ctx.path(*cfg.w1, grid, "w1");
    w2 = ctx.path(*cfg.w2, grid, "w2");
    for (std::size_t m = 0; m < fq.size(); ++m) {
      fq[m] = f(line.node(node), grid.at(m));
      if (fq[m] == 0.0) {
        throw AssumptionViolation("source nonvanishing at q", "f(q, t) = 0 at t = " + std::to_string(grid.at(m)));
      }
    }
  } else {
    const TimeFunction p = ctx.time_data(*cfg.p, grid, "p");
    truth = SampledPath::sample(grid, p);
    const PairObservation obs =
        ctx.phases().time("observe", [&] { return observe_pair(s, phi, f, p, *cfg.q, line, grid); });
    w1 = obs.w1;
    w2 = obs.w2;
    fq = obs.f_at_q.values();
    ctx.write_path("w1.csv", w1);
    ctx.write_path("w2.csv", w2);
  }
  record_observation(ctx, *cfg.q, node, line.node(node));
  const SampledPath p =
      ctx.phases().time("recover", [&] { return recover_p_double(w1, w2, SampledPath(grid, fq)); });
  ctx.write_path("p.csv", p);
  ctx.report()["assumptions"] = {
      {"checks", json::array({{{"name", "source nonvanishing at q"}, {"satisfied", true}, {"detail", ""}}})},
      {"warnings", json::array()}};
  if (truth) {
    const double error = sup_distance(p, *truth);
    ctx.report()["residuals"] = {{"coefficient_error", error}};
    ctx.report()["residual"] = error;
  } else {
    ctx.report()["residuals"] = json::object();
    ctx.report()["residual"] = nullptr;
  }
}

void run_invert_source(Context& ctx) {
  const RunConfig& cfg = ctx.cfg();
  const DirichletSpectrum spectrum = build_spectrum(ctx);
  const NodeSet nodes = interval_nodes(spectrum);
  const TimeGrid grid(cfg.horizon, cfg.steps);
  const NodeArray phi = ctx.spatial(*cfg.phi, nodes, "phi");
  const NodeArray psi = ctx.spatial(*cfg.psi, nodes, "psi");
  const SourcePair pair = ctx.phases().time("recover", [&] { return recover_source(spectrum, phi, psi, grid); });
  ctx.write("source.csv", {"x", "f"}, {to_vector(nodes.x), to_vector(pair.f)});
  ctx.write_field("field.csv", nodes.x, grid, pair.u.node_values());
  ctx.report()["residuals"] = {{"initial", pair.initial_residual}, {"terminal", pair.terminal_residual}};
  ctx.report()["residual"] = std::max(pair.initial_residual, pair.terminal_residual);
}

bool run_selftest(Context& ctx, const RunOptions& options) {
  acceptance::Options acc;
  acc.corrupt_weights = options.corrupt_weights;
  std::ostream& log = options.log ? *options.log : std::cout;
  const auto results = ctx.phases().time("selftest", [&] { return acceptance::run_all(acc, log); });
  json criteria = json::array();
  bool all = true;
  for (const auto& r : results) {
    criteria.push_back(
        {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"measured", r.measured}, {"seconds", r.seconds}});
    all = all && r.passed;
  }
  ctx.report()["criteria"] = criteria;
  return all;
}

json resolved_parameters(const RunConfig& cfg) {
  json params = {{"s", cfg.s}, {"T", cfg.horizon}, {"M", cfg.steps}};
  if (cfg.q) params["q"] = *cfg.q;
  params["phi"] = describe(cfg.phi);
  params["f"] = describe(cfg.f);
  params["p"] = describe(cfg.p);
  params["w"] = describe(cfg.w);
  params["omega"] = describe(cfg.omega);
  params["psi"] = describe(cfg.psi);
  params["compat_tol"] = cfg.compat_tol;
  params["modes"] = cfg.modes;
  return params;
}

}  // namespace

int run(const RunConfig& config, const fs::path& out_dir, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Phases phases;
  Context ctx(config, out_dir, phases);
  json& report = ctx.report();
  report["problem"] = to_string(config.problem);
  if (config.problem != ProblemKind::selftest) report["parameters"] = resolved_parameters(config);

  int code = exit_ok;
  try {
    fs::create_directories(out_dir);
    switch (config.problem) {
      case ProblemKind::spectrum: run_spectrum(ctx); break;
      case ProblemKind::forward: run_forward(ctx); break;
      case ProblemKind::invert_single: run_invert_single(ctx); break;
      case ProblemKind::invert_nonlocal: run_invert_nonlocal(ctx); break;
      case ProblemKind::invert_double: run_invert_double(ctx); break;
      case ProblemKind::invert_source: run_invert_source(ctx); break;
      case ProblemKind::selftest:
        if (!run_selftest(ctx, options)) code = exit_numerical;
        break;
    }
    report["status"] = code == exit_ok ? "ok" : "failed";
  } catch (const std::exception& e) {
    code = exit_code_for(e);
    report["status"] = "error";
    report["error"] = e.what();
    if (const auto* violation = dynamic_cast<const AssumptionViolation*>(&e)) {
      report["violated_assumption"] = violation->assumption();
    }
    if (options.log) *options.log << "error: " << e.what() << '\n';
  }
  report["exit_code"] = code;
  report["timings"] = phases.to_json();
  report["timings"]["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::ofstream out(out_dir / "report.json");
  if (out) out << report.dump(2) << '\n';
  return code;
}

}  // namespace fracinv
