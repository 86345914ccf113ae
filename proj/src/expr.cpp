#include "fracinv/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace fracinv::expr {

enum class Kind { number, symbol, pi, negate, add, subtract, multiply, divide, power, call };
enum class Function { sin, cos, exp, sqrt, abs };

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  Symbol symbol = Symbol::x;
  Function function = Function::sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Expr::Node>;

ParseError::ParseError(std::size_t offset, const std::string& message)
    : UsageError("expression syntax error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

namespace {

const char* function_name(Function f) {
  switch (f) {
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::exp: return "exp";
    case Function::sqrt: return "sqrt";
    case Function::abs: return "abs";
  }
  return "?";
}

const char* symbol_name(Symbol s) {
  switch (s) {
    case Symbol::x: return "x";
    case Symbol::t: return "t";
    case Symbol::lambda1: return "lambda1";
  }
  return "?";
}

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto node = std::make_shared<Expr::Node>();
  node->kind = kind;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    NodePtr root = expression();
    skip_space();
    if (pos_ != src_.size()) {
      throw ParseError(pos_, "expected operator or end of input, found '" + std::string(1, src_[pos_]) + "'");
    }
    return root;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(pos_, std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr node = term();
    for (;;) {
      if (accept('+')) {
        node = make(Kind::add, node, term());
      } else if (accept('-')) {
        node = make(Kind::subtract, node, term());
      } else {
        return node;
      }
    }
  }

  NodePtr term() {
    NodePtr node = factor();
    for (;;) {
      if (accept('*')) {
        node = make(Kind::multiply, node, factor());
      } else if (accept('/')) {
        node = make(Kind::divide, node, factor());
      } else {
        return node;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) return make(Kind::negate, factor());
    NodePtr base = atom();
    if (accept('^')) return make(Kind::power, base, factor());
    return base;
  }

  NodePtr atom() {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError(pos_, "expected a number, identifier or '('");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    throw ParseError(pos_, std::string("expected a number, identifier or '(', found '") + c + "'");
  }

  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  NodePtr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && is_digit(src_[end])) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && is_digit(src_[end])) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) ++exp_end;
      if (exp_end < src_.size() && is_digit(src_[exp_end])) {
        while (exp_end < src_.size() && is_digit(src_[exp_end])) ++exp_end;
        end = exp_end;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, value);
    if (ec != std::errc() || ptr != src_.data() + end || !std::isfinite(value)) {
      throw ParseError(start, "malformed number '" + std::string(src_.substr(start, end - start)) + "'");
    }
    pos_ = end;
    auto node = std::make_shared<Expr::Node>();
    node->kind = Kind::number;
    node->value = value;
    return node;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr Function functions[] = {Function::sin, Function::cos, Function::exp, Function::sqrt,
                                             Function::abs};
    for (Function f : functions) {
      if (name == function_name(f)) {
        expect('(');
        auto node = std::make_shared<Expr::Node>();
        node->kind = Kind::call;
        node->function = f;
        node->lhs = expression();
        expect(')');
        return node;
      }
    }

    auto node = std::make_shared<Expr::Node>();
    if (name == "pi") {
      node->kind = Kind::pi;
    } else if (name == "x" || name == "t" || name == "lambda1") {
      node->kind = Kind::symbol;
      node->symbol = name == "x" ? Symbol::x : name == "t" ? Symbol::t : Symbol::lambda1;
    } else {
      throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
    }
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      throw ParseError(start, "'" + std::string(name) + "' is not a function");
    }
    return node;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalFailure(std::string("non-finite result in ") + what);
  return v;
}

double eval(const Expr::Node& n, const Bindings& b) {
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::pi: return std::numbers::pi;
    case Kind::symbol: {
      const std::optional<double>& v = n.symbol == Symbol::x ? b.x : n.symbol == Symbol::t ? b.t : b.lambda1;
      if (!v) throw UsageError(std::string("unbound variable '") + symbol_name(n.symbol) + "'");
      return *v;
    }
    case Kind::negate: return -eval(*n.lhs, b);
    case Kind::add: return checked(eval(*n.lhs, b) + eval(*n.rhs, b), "addition");
    case Kind::subtract: return checked(eval(*n.lhs, b) - eval(*n.rhs, b), "subtraction");
    case Kind::multiply: return checked(eval(*n.lhs, b) * eval(*n.rhs, b), "multiplication");
    case Kind::divide: {
      const double num = eval(*n.lhs, b);
      const double den = eval(*n.rhs, b);
      if (den == 0.0) throw NumericalFailure("division by zero");
      return checked(num / den, "division");
    }
    case Kind::power: return checked(std::pow(eval(*n.lhs, b), eval(*n.rhs, b)), "power");
    case Kind::call: {
      const double arg = eval(*n.lhs, b);
      switch (n.function) {
        case Function::sin: return std::sin(arg);
        case Function::cos: return std::cos(arg);
        case Function::exp: return checked(std::exp(arg), "exp");
        case Function::sqrt:
          if (arg < 0.0) throw NumericalFailure("sqrt of negative argument");
          return std::sqrt(arg);
        case Function::abs: return std::abs(arg);
      }
    }
  }
  throw NumericalFailure("corrupt expression tree");
}

// Precedence levels used by the printer: sums 1, products 2, negation 3,
// powers 4, atoms 5.
int level(const Expr::Node& n) {
  switch (n.kind) {
    case Kind::add:
    case Kind::subtract: return 1;
    case Kind::multiply:
    case Kind::divide: return 2;
    case Kind::negate: return 3;
    case Kind::power: return 4;
    default: return 5;
  }
}

void print(const Expr::Node& n, std::string& out);

void print_wrapped(const Expr::Node& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(n, out);
  if (wrap) out += ')';
}

void print(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::number: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
      out.append(buf, res.ptr);
      return;
    }
    case Kind::pi: out += "pi"; return;
    case Kind::symbol: out += symbol_name(n.symbol); return;
    case Kind::negate:
      out += '-';
      print_wrapped(*n.lhs, level(*n.lhs) < 3, out);
      return;
    case Kind::add:
    case Kind::subtract:
      print_wrapped(*n.lhs, false, out);
      out += n.kind == Kind::add ? " + " : " - ";
      print_wrapped(*n.rhs, level(*n.rhs) <= 1, out);
      return;
    case Kind::multiply:
    case Kind::divide:
      print_wrapped(*n.lhs, level(*n.lhs) < 2, out);
      out += n.kind == Kind::multiply ? '*' : '/';
      print_wrapped(*n.rhs, level(*n.rhs) <= 2, out);
      return;
    case Kind::power:
      print_wrapped(*n.lhs, level(*n.lhs) < 5, out);
      out += '^';
      print_wrapped(*n.rhs, level(*n.rhs) < 3, out);
      return;
    case Kind::call:
      out += function_name(n.function);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

bool node_uses(const Expr::Node& n, Symbol s) {
  if (n.kind == Kind::symbol) return n.symbol == s;
  return (n.lhs && node_uses(*n.lhs, s)) || (n.rhs && node_uses(*n.rhs, s));
}

}  // namespace

double Expr::evaluate(const Bindings& bindings) const { return eval(*root_, bindings); }

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool Expr::uses(Symbol symbol) const { return node_uses(*root_, symbol); }

Expr parse(std::string_view source) { return Expr(Parser(source).parse_all()); }

}  // namespace fracinv::expr
