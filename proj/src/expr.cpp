#include "pwacut/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace pwacut::expr {

namespace {

struct FunctionInfo {
  std::string_view name;
  Function function;
  std::size_t arity;
};

constexpr std::array<FunctionInfo, 11> kFunctions = {{
    {"sin", Function::Sin, 1},
    {"cos", Function::Cos, 1},
    {"tan", Function::Tan, 1},
    {"atan", Function::Atan, 1},
    {"atan2", Function::Atan2, 2},
    {"exp", Function::Exp, 1},
    {"log", Function::Log, 1},
    {"sqrt", Function::Sqrt, 1},
    {"abs", Function::Abs, 1},
    {"min", Function::Min, 2},
    {"max", Function::Max, 2},
}};

std::optional<FunctionInfo> find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f;
  return std::nullopt;
}

std::string_view function_name(Function fn) {
  for (const auto& f : kFunctions)
    if (f.function == fn) return f.name;
  return "?";
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

const std::set<std::string> kOperand = {"number", "identifier", "(", "-"};
const std::set<std::string> kOperator = {"+", "-", "*", "/", "^", "end of input"};

NodePtr make(Kind k, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, Dims dims, const Constants& constants)
      : text_(text), dims_(dims), constants_(constants) {}

  NodePtr run() {
    NodePtr e = expression(0);
    skip_space();
    if (pos_ < text_.size()) {
      const std::set<std::string> expected = kOperator;
      throw ParseError(pos_ + 1, "unexpected '" + std::string(1, text_[pos_]) + "'", expected);
    }
    return e;
  }

 private:
  static constexpr int kUnaryBinding = 30;

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::optional<char> peek() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    return text_[pos_];
  }

  void expect(char c, const std::set<std::string>& expected) {
    const auto got = peek();
    if (got != c) {
      throw ParseError(pos_ + 1, got ? "unexpected '" + std::string(1, *got) + "'" : "unexpected end of input",
                       expected);
    }
    ++pos_;
  }

  static std::optional<std::pair<int, int>> binding(char op) {
    switch (op) {
      case '+':
      case '-':
        return std::pair{10, 11};
      case '*':
      case '/':
        return std::pair{20, 21};
      case '^':
        return std::pair{40, 40};
      default:
        return std::nullopt;
    }
  }

  static Kind binary_kind(char op) {
    switch (op) {
      case '+':
        return Kind::Add;
      case '-':
        return Kind::Subtract;
      case '*':
        return Kind::Multiply;
      case '/':
        return Kind::Divide;
      default:
        return Kind::Power;
    }
  }

  NodePtr expression(int min_binding) {
    NodePtr lhs = operand();
    for (;;) {
      const auto c = peek();
      if (!c) break;
      const auto bp = binding(*c);
      if (!bp || bp->first < min_binding) break;
      ++pos_;
      NodePtr rhs = expression(bp->second);
      lhs = make(binary_kind(*c), {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  NodePtr operand() {
    const auto c = peek();
    if (!c) throw ParseError(pos_ + 1, "unexpected end of input", kOperand);
    if (*c == '(') {
      ++pos_;
      NodePtr inner = expression(0);
      expect(')', {")", "+", "-", "*", "/", "^"});
      return inner;
    }
    if (*c == '-') {
      ++pos_;
      return make(Kind::Negate, {expression(kUnaryBinding)});
    }
    if (std::isdigit(static_cast<unsigned char>(*c)) || *c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(*c)) || *c == '_') return identifier();
    throw ParseError(pos_ + 1, "unexpected '" + std::string(1, *c) + "'", kOperand);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto is_digit = [&](std::size_t i) { return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i])); };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (is_digit(p)) {
        pos_ = p;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError(start + 1, "malformed number", {"number"});
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    if (const auto fn = find_function(name)) {
      if (peek() != '(') throw ParseError(pos_ + 1, "expected '(' after function " + name, {"("});
      ++pos_;
      std::vector<NodePtr> args;
      if (peek() != ')') {
        args.push_back(expression(0));
        while (peek() == ',') {
          ++pos_;
          args.push_back(expression(0));
        }
      }
      expect(')', {")", ","});
      if (args.size() != fn->arity) throw ArityError(start + 1, name, fn->arity, args.size());
      auto n = std::make_shared<Node>();
      n->kind = Kind::Call;
      n->function = fn->function;
      n->args = std::move(args);
      return n;
    }

    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'u')) {
      const std::string_view digits = std::string_view(name).substr(1);
      std::size_t idx = 0;
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
      if (res.ec == std::errc() && res.ptr == digits.data() + digits.size() && digits[0] != '0') {
        const std::size_t limit = name[0] == 'x' ? dims_.states : dims_.inputs;
        if (idx < 1 || idx > limit) throw UnknownIdentifier(start + 1, name);
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->index = (name[0] == 'x' ? 0 : dims_.states) + idx - 1;
        n->name = name;
        return n;
      }
    }

    std::optional<double> value;
    if (const auto it = constants_.find(name); it != constants_.end())
      value = it->second;
    else if (name == "pi")
      value = std::numbers::pi;
    if (!value) throw UnknownIdentifier(start + 1, name);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->name = name;
    n->value = *value;
    return n;
  }

  std::string_view text_;
  Dims dims_;
  const Constants& constants_;
  std::size_t pos_ = 0;
};

char op_symbol(Kind k) {
  switch (k) {
    case Kind::Add:
      return '+';
    case Kind::Subtract:
      return '-';
    case Kind::Multiply:
      return '*';
    case Kind::Divide:
      return '/';
    default:
      return '^';
  }
}

double checked(const Node& node, double v, const char* reason) {
  if (!std::isfinite(v)) throw EvalError(to_string(node), reason);
  return v;
}

double eval_node(const Node& n, const Vec& x) {
  switch (n.kind) {
    case Kind::Number:
    case Kind::Constant:
      return n.value;
    case Kind::Variable:
      return x[static_cast<Eigen::Index>(n.index)];
    case Kind::Negate:
      return -eval_node(*n.args[0], x);
    case Kind::Add:
      return checked(n, eval_node(*n.args[0], x) + eval_node(*n.args[1], x), "non-finite sum");
    case Kind::Subtract:
      return checked(n, eval_node(*n.args[0], x) - eval_node(*n.args[1], x), "non-finite difference");
    case Kind::Multiply:
      return checked(n, eval_node(*n.args[0], x) * eval_node(*n.args[1], x), "non-finite product");
    case Kind::Divide: {
      const double num = eval_node(*n.args[0], x);
      const double den = eval_node(*n.args[1], x);
      if (den == 0.0) throw EvalError(to_string(n), "division by zero");
      return checked(n, num / den, "non-finite quotient");
    }
    case Kind::Power: {
      const double base = eval_node(*n.args[0], x);
      const double ex = eval_node(*n.args[1], x);
      if (base < 0.0 && ex != std::trunc(ex)) throw EvalError(to_string(n), "negative base with non-integer exponent");
      return checked(n, std::pow(base, ex), "non-finite power");
    }
    case Kind::Call: {
      const double a = eval_node(*n.args[0], x);
      switch (n.function) {
        case Function::Sin:
          return checked(n, std::sin(a), "non-finite sin");
        case Function::Cos:
          return checked(n, std::cos(a), "non-finite cos");
        case Function::Tan:
          return checked(n, std::tan(a), "non-finite tan");
        case Function::Atan:
          return checked(n, std::atan(a), "non-finite atan");
        case Function::Atan2:
          return checked(n, std::atan2(a, eval_node(*n.args[1], x)), "non-finite atan2");
        case Function::Exp:
          return checked(n, std::exp(a), "exp overflow");
        case Function::Log:
          if (!(a > 0.0)) throw EvalError(to_string(n), "log of a nonpositive value");
          return checked(n, std::log(a), "non-finite log");
        case Function::Sqrt:
          if (a < 0.0) throw EvalError(to_string(n), "sqrt of a negative value");
          return std::sqrt(a);
        case Function::Abs:
          return std::abs(a);
        case Function::Min:
          return std::min(a, eval_node(*n.args[1], x));
        case Function::Max:
          return std::max(a, eval_node(*n.args[1], x));
      }
    }
  }
  return 0.0;
}

std::string join_expected(const std::set<std::string>& expected) {
  std::string out;
  for (const auto& e : expected) out += (out.empty() ? "" : ", ") + e;
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t off, const std::string& what, std::set<std::string> exp)
    : Error("parse error at offset " + std::to_string(off) + ": " + what +
            (exp.empty() ? std::string() : " (expected " + join_expected(exp) + ")")),
      offset(off),
      expected(std::move(exp)) {}

UnknownIdentifier::UnknownIdentifier(std::size_t off, const std::string& name)
    : ParseError(off, "unknown identifier '" + name + "'"), identifier(name) {}

ArityError::ArityError(std::size_t off, const std::string& fn, std::size_t want, std::size_t got)
    : ParseError(off, fn + " takes " + std::to_string(want) + " argument(s), got " + std::to_string(got)) {}

EvalError::EvalError(const std::string& subexpr, const std::string& reason)
    : Error(reason + " in " + subexpr), subexpression(subexpr) {}

bool equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Kind::Number:
      if (a.value != b.value) return false;
      break;
    case Kind::Variable:
      if (a.index != b.index) return false;
      break;
    case Kind::Constant:
      if (a.name != b.name || a.value != b.value) return false;
      break;
    case Kind::Call:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

std::string to_string(const Node& n) {
  switch (n.kind) {
    case Kind::Number:
      return format_number(n.value);
    case Kind::Variable:
    case Kind::Constant:
      return n.name;
    case Kind::Negate:
      return "(-" + to_string(*n.args[0]) + ")";
    case Kind::Call: {
      std::string out(function_name(n.function));
      out += "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) out += (i ? ", " : "") + to_string(*n.args[i]);
      return out + ")";
    }
    default:
      return "(" + to_string(*n.args[0]) + " " + op_symbol(n.kind) + " " + to_string(*n.args[1]) + ")";
  }
}

std::string Expr::str() const { return to_string(*root_); }

Expr parse(std::string_view text, Dims dims, const Constants& constants) {
  Parser p(text, dims, constants);
  return Expr(p.run(), dims);
}

double eval_expr(const Expr& e, const Vec& x) {
  if (static_cast<std::size_t>(x.size()) != e.dims().total())
    throw Error("expression expects " + std::to_string(e.dims().total()) + " coordinates, got " +
                std::to_string(x.size()));
  return eval_node(e.root(), x);
}

Vec eval_all(const std::vector<Expr>& exprs, const Vec& x) {
  Vec out(static_cast<Eigen::Index>(exprs.size()));
  for (std::size_t i = 0; i < exprs.size(); ++i) out[static_cast<Eigen::Index>(i)] = eval_expr(exprs[i], x);
  return out;
}

}  // namespace pwacut::expr
