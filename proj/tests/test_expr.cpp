#include "fracinv/error.hpp"
#include "fracinv/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

using namespace fracinv;
using expr::Bindings;
using expr::parse;

namespace {

double eval(const std::string& text, Bindings b = {}) { return parse(text).evaluate(b); }

std::size_t error_offset(const std::string& text) {
  try {
    parse(text);
  } catch (const expr::ParseError& e) {
    return e.offset();
  }
  return std::string::npos;
}

// Random well-formed expression over x and t.
std::string random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_int_distribution<int> digit(1, 9);
  switch (pick(rng)) {
    case 0: return std::to_string(digit(rng)) + "." + std::to_string(digit(rng));
    case 1: return "x";
    case 2: return "t";
    case 3: return random_expression(rng, depth - 1) + " + " + random_expression(rng, depth - 1);
    case 4: return random_expression(rng, depth - 1) + " - " + random_expression(rng, depth - 1);
    case 5: return "(" + random_expression(rng, depth - 1) + ")*" + random_expression(rng, depth - 1);
    case 6: return random_expression(rng, depth - 1) + "/(2 + " + random_expression(rng, depth - 1) + "^2)";
    case 7: return "-" + random_expression(rng, depth - 1);
    case 8: return "(" + random_expression(rng, depth - 1) + ")^2";
    default: {
      static const char* fns[] = {"sin", "cos", "exp", "abs"};
      std::uniform_int_distribution<int> f(0, 3);
      const std::string inner = random_expression(rng, depth - 1);
      return std::string(fns[f(rng)]) + "(" + (f(rng) == 2 ? "0.1*(" + inner + ")" : inner) + ")";
    }
  }
}

}  // namespace

TEST_CASE("evaluation examples") {
  Bindings b;
  b.lambda1 = 2.0;
  b.t = 0.5;
  CHECK(eval("exp(-lambda1*t)", b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  Bindings bx;
  bx.x = -3.0;
  CHECK(eval("x^2", bx) == 9.0);
  CHECK(eval("sqrt(16) + abs(-2) + cos(0)") == 7.0);
  CHECK(eval("pi") == doctest::Approx(3.141592653589793).epsilon(1e-16));
}

TEST_CASE("precedence and associativity") {
  Bindings b;
  b.x = 3.0;
  CHECK(eval("-x^2", b) == -9.0);
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("2^-1") == 0.5);
  CHECK(eval("1 - 2 - 3") == -4.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("--x", b) == 3.0);
  CHECK(eval("1.5e1") == 15.0);
}

TEST_CASE("numerical failures are raised instead of NaN") {
  Bindings b;
  b.t = 1.0;
  CHECK_THROWS_AS(eval("1/ (t-t)", b), NumericalFailure);
  CHECK_THROWS_AS(eval("sqrt(-1)"), NumericalFailure);
  CHECK_THROWS_AS(eval("exp(1000)"), NumericalFailure);
}

TEST_CASE("unbound symbols are usage errors") {
  CHECK_THROWS_AS(eval("x + 1"), UsageError);
  CHECK_THROWS_AS(eval("lambda1"), UsageError);
}

TEST_CASE("parse errors carry offsets") {
  CHECK(error_offset("1 + * 2") == 4);
  CHECK(error_offset("foo(1)") == 0);
  CHECK(error_offset("x + y") == 4);
  CHECK(error_offset("(1 + 2") == 6);
  CHECK(error_offset("1 2") == 2);
  CHECK(error_offset("") == 0);
  CHECK(error_offset("x(1)") == 0);
  CHECK_THROWS_AS(parse("sin"), expr::ParseError);
  CHECK_THROWS_AS(parse("1..2"), expr::ParseError);
}

TEST_CASE("symbol usage") {
  const auto e = parse("x*exp(-lambda1*t)");
  CHECK(e.uses(expr::Symbol::x));
  CHECK(e.uses(expr::Symbol::t));
  CHECK(e.uses(expr::Symbol::lambda1));
  CHECK_FALSE(parse("sin(t)").uses(expr::Symbol::x));
}

TEST_CASE("pretty printing round trips on fuzzed expressions") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  int checked = 0;
  while (checked < 50) {
    const std::string text = random_expression(rng, 4);
    const auto first = parse(text);
    const std::string printed = first.to_string();
    const auto second = parse(printed);
    CHECK(second.to_string() == printed);
    Bindings b;
    b.x = coord(rng);
    b.t = coord(rng);
    double a = 0.0;
    double c = 0.0;
    try {
      a = first.evaluate(b);
      c = second.evaluate(b);
    } catch (const NumericalFailure&) {
      continue;
    }
    CHECK(a == c);
    ++checked;
  }
}

TEST_CASE("minimal parentheses") {
  CHECK(parse("(x)").to_string() == "x");
  CHECK(parse("-(x^2)").to_string() == parse("-x^2").to_string());
  CHECK(parse("(1 - 2) - 3").to_string() == parse("1 - 2 - 3").to_string());
  CHECK(parse("1 - (2 - 3)").to_string() != parse("1 - 2 - 3").to_string());
  CHECK(parse("(2^3)^2").to_string() != parse("2^3^2").to_string());
}
