#include "fracinv/config.hpp"

#include "fracinv/error.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>

namespace fracinv {

using nlohmann::json;

namespace {

struct Problem {
  ProblemKind kind;
  const char* name;
};

constexpr Problem problems[] = {
    {ProblemKind::spectrum, "spectrum"},
    {ProblemKind::forward, "forward"},
    {ProblemKind::invert_single, "invert-single"},
    {ProblemKind::invert_nonlocal, "invert-nonlocal"},
    {ProblemKind::invert_double, "invert-double"},
    {ProblemKind::invert_source, "invert-source"},
    {ProblemKind::selftest, "selftest"},
};

const std::set<std::string> known_keys{"problem", "s",     "domain", "n",  "L",     "N",  "T",
                                       "M",       "q",     "phi",    "f",  "p",     "w",  "omega",
                                       "psi",     "w1",    "w2",     "compat_tol", "modes", "output"};

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw UsageError("config field '" + field + "': " + message);
}

double number(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) fail(key, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, "must be finite");
  return d;
}

std::size_t count(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i >= 0) return static_cast<std::size_t>(i);
    fail(key, "must be a non-negative integer");
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1e15) return static_cast<std::size_t>(d);
  }
  fail(key, "must be a non-negative integer");
}

// Symbols an expression in this field may reference.
struct Allowed {
  bool x;
  bool t;
  bool lambda1;
};

expr::Expr expression(const json& v, const std::string& field, Allowed allowed) {
  if (!v.is_string()) fail(field, "expression must be a string");
  expr::Expr e = [&] {
    try {
      return expr::parse(v.get<std::string>());
    } catch (const expr::ParseError& err) {
      fail(field, err.what());
    }
  }();
  if (!allowed.x && e.uses(expr::Symbol::x)) fail(field, "expression may not depend on x");
  if (!allowed.t && e.uses(expr::Symbol::t)) fail(field, "expression may not depend on t");
  if (!allowed.lambda1 && e.uses(expr::Symbol::lambda1)) {
    fail(field, "lambda1 is only defined for problems on an interval");
  }
  return e;
}

struct DataRules {
  Allowed symbols;
  bool eigenfunction = false;
  bool time_factor = false;
  bool datum_forms = false;
};

DataSpec data(const json& v, const std::string& field, const DataRules& rules, const std::filesystem::path& base) {
  DataSpec spec;
  if (v.is_string()) {
    spec.kind = DataSpec::Kind::expression;
    spec.expression = expression(v, field, rules.symbols);
    return spec;
  }
  if (!v.is_object()) fail(field, "must be an expression string or an object");

  std::set<std::string> allowed{"csv"};
  if (rules.eigenfunction) allowed.insert("eigenfunction");
  if (rules.eigenfunction && rules.time_factor) allowed.insert("time");
  if (rules.datum_forms) allowed.insert({"expr", "scale_by_phi_at_q", "from_coefficient"});
  for (const auto& [key, _] : v.items()) {
    if (!allowed.contains(key)) fail(field, "unexpected key '" + key + "'");
  }

  const Allowed time_only{false, true, rules.symbols.lambda1};
  if (v.contains("csv")) {
    if (v.size() != 1) fail(field, "'csv' cannot be combined with other keys");
    if (!v["csv"].is_string()) fail(field, "'csv' must be a path string");
    spec.kind = DataSpec::Kind::csv;
    std::filesystem::path path = v["csv"].get<std::string>();
    if (path.is_relative() && !base.empty()) path = base / path;
    if (!std::filesystem::exists(path)) fail(field, "file " + path.string() + " does not exist");
    spec.csv = path;
    return spec;
  }
  if (v.contains("eigenfunction")) {
    spec.kind = DataSpec::Kind::eigenfunction;
    const std::size_t k = count(v, "eigenfunction");
    if (k < 1) fail(field, "eigenfunction index starts at 1");
    spec.eigenfunction = k;
    if (v.contains("time")) spec.time_factor = expression(v["time"], field + ".time", time_only);
    return spec;
  }
  if (v.contains("from_coefficient")) {
    if (v.size() != 1) fail(field, "'from_coefficient' cannot be combined with other keys");
    spec.kind = DataSpec::Kind::expression;
    spec.from_coefficient = expression(v["from_coefficient"], field + ".from_coefficient", time_only);
    return spec;
  }
  if (v.contains("expr")) {
    spec.kind = DataSpec::Kind::expression;
    spec.expression = expression(v["expr"], field + ".expr", rules.symbols);
    if (v.contains("scale_by_phi_at_q")) {
      if (!v["scale_by_phi_at_q"].is_boolean()) fail(field, "'scale_by_phi_at_q' must be true or false");
      spec.scale_by_phi_at_q = v["scale_by_phi_at_q"].get<bool>();
    }
    return spec;
  }
  fail(field, "object needs one of the keys: csv" + std::string(rules.eigenfunction ? ", eigenfunction" : "") +
                  (rules.datum_forms ? ", expr, from_coefficient" : ""));
}

void require(const RunConfig& cfg, const std::optional<DataSpec>& spec, const char* field) {
  if (!spec) fail(field, "is required for problem '" + to_string(cfg.problem) + "'");
}

}  // namespace

std::string to_string(ProblemKind kind) {
  for (const auto& p : problems) {
    if (p.kind == kind) return p.name;
  }
  return "?";
}

std::string DataSpec::describe() const {
  switch (kind) {
    case Kind::csv: return "csv:" + csv.string();
    case Kind::eigenfunction:
      return "eigenfunction " + std::to_string(eigenfunction) + (time_factor ? " * (" + time_factor->to_string() + ")" : "");
    case Kind::expression:
      if (from_coefficient) return "generated from coefficient " + from_coefficient->to_string();
      return expression->to_string() + (scale_by_phi_at_q ? " * phi(q)" : "");
  }
  return "?";
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!known_keys.contains(key)) fail(key, "unknown field");
  }

  RunConfig cfg;
  cfg.source = doc;
  if (!doc.contains("problem") || !doc["problem"].is_string()) fail("problem", "must be given as a string");
  const std::string name = doc["problem"].get<std::string>();
  bool found = false;
  for (const auto& p : problems) {
    if (name == p.name) {
      cfg.problem = p.kind;
      found = true;
    }
  }
  if (!found) {
    fail("problem", "unknown problem '" + name +
                        "' (expected spectrum, forward, invert-single, invert-nonlocal, invert-double, "
                        "invert-source or selftest)");
  }
  if (cfg.problem == ProblemKind::selftest) return cfg;

  if (doc.contains("s")) cfg.s = number(doc, "s");
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) fail("s", "must lie in (0, 1), got " + std::to_string(cfg.s));

  const bool line = cfg.problem == ProblemKind::invert_double;
  if (line) {
    if (doc.contains("L")) cfg.half_width = number(doc, "L");
    if (!(cfg.half_width > 0.0)) fail("L", "must be positive");
    if (doc.contains("N")) cfg.line_nodes = count(doc, "N");
    if (cfg.line_nodes < 4) fail("N", "must be at least 4");
  } else {
    if (doc.contains("domain")) {
      const json& d = doc["domain"];
      if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number()) {
        fail("domain", "must be an array [a, b]");
      }
      cfg.a = d[0].get<double>();
      cfg.b = d[1].get<double>();
      if (!(std::isfinite(cfg.a) && std::isfinite(cfg.b) && cfg.a < cfg.b)) fail("domain", "needs finite a < b");
    }
    if (doc.contains("n")) cfg.n = count(doc, "n");
    if (cfg.n < 2) fail("n", "must be at least 2");
  }
  if (doc.contains("T")) cfg.horizon = number(doc, "T");
  if (!(cfg.horizon > 0.0)) fail("T", "must be positive");
  if (doc.contains("M")) cfg.steps = count(doc, "M");
  if (cfg.steps < 2) fail("M", "must be at least 2");
  if (doc.contains("q")) cfg.q = number(doc, "q");
  if (doc.contains("compat_tol")) {
    cfg.compat_tol = number(doc, "compat_tol");
    if (!(cfg.compat_tol >= 0.0)) fail("compat_tol", "must be non-negative");
  }
  if (doc.contains("modes")) cfg.modes = count(doc, "modes");
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) fail("output", "must be a path string");
    cfg.output = doc["output"].get<std::string>();
  }

  const bool lam = !line;
  const DataRules spatial{{true, false, lam}, !line, false, false};
  const DataRules source{{true, true, lam}, !line, true, false};
  const DataRules temporal{{false, true, lam}, false, false, false};
  const DataRules datum{{false, true, lam}, false, false, true};
  auto read = [&](const char* key, const DataRules& rules) -> std::optional<DataSpec> {
    if (!doc.contains(key)) return std::nullopt;
    return data(doc[key], key, rules, base);
  };
  cfg.phi = read("phi", spatial);
  cfg.f = read("f", source);
  cfg.p = read("p", temporal);
  cfg.w = read("w", datum);
  cfg.omega = read("omega", spatial);
  cfg.psi = read("psi", spatial);
  cfg.w1 = read("w1", temporal);
  cfg.w2 = read("w2", temporal);

  if (cfg.problem != ProblemKind::spectrum && cfg.q && !line && !(cfg.q > cfg.a && cfg.q < cfg.b)) {
    fail("q", "must lie strictly inside the domain");
  }
  if (line && cfg.q && !(std::abs(*cfg.q) < cfg.half_width)) fail("q", "must lie strictly inside (-L, L)");

  switch (cfg.problem) {
    case ProblemKind::spectrum:
    case ProblemKind::selftest: break;
    case ProblemKind::forward: require(cfg, cfg.phi, "phi"); break;
    case ProblemKind::invert_single:
      require(cfg, cfg.phi, "phi");
      require(cfg, cfg.f, "f");
      require(cfg, cfg.w, "w");
      if (!cfg.q) fail("q", "is required for problem 'invert-single'");
      break;
    case ProblemKind::invert_nonlocal:
      require(cfg, cfg.phi, "phi");
      require(cfg, cfg.f, "f");
      require(cfg, cfg.omega, "omega");
      require(cfg, cfg.w, "w");
      if (cfg.w->scale_by_phi_at_q) fail("w", "'scale_by_phi_at_q' needs a point datum");
      break;
    case ProblemKind::invert_double:
      require(cfg, cfg.phi, "phi");
      require(cfg, cfg.f, "f");
      if (!cfg.q) fail("q", "is required for problem 'invert-double'");
      if (cfg.w1.has_value() != cfg.w2.has_value()) fail(cfg.w1 ? "w2" : "w1", "w1 and w2 must be given together");
      if (!cfg.w1 && !cfg.p) fail("p", "give either p (to generate data) or measured w1 and w2");
      if (cfg.w1 && (cfg.w1->kind != DataSpec::Kind::csv || cfg.w2->kind != DataSpec::Kind::csv)) {
        fail("w1", "measured paths must be CSV files");
      }
      break;
    case ProblemKind::invert_source:
      require(cfg, cfg.phi, "phi");
      require(cfg, cfg.psi, "psi");
      break;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace fracinv
