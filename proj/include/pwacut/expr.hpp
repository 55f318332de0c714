#pragma once

#include "pwacut/errors.hpp"
#include "pwacut/geometry.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pwacut::expr {

/// Variable layout: x1..x<states> come first, then u1..u<inputs>.
struct Dims {
  std::size_t states = 0;
  std::size_t inputs = 0;

  std::size_t total() const { return states + inputs; }
  bool operator==(const Dims&) const = default;
};

using Constants = std::map<std::string, double, std::less<>>;

enum class Kind { Number, Variable, Constant, Negate, Add, Subtract, Multiply, Divide, Power, Call };
enum class Function { Sin, Cos, Tan, Atan, Atan2, Exp, Log, Sqrt, Abs, Min, Max };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Number;
  double value = 0.0;       // Number, Constant
  std::size_t index = 0;    // Variable: position in the augmented vector
  std::string name;         // Variable, Constant
  Function function = Function::Sin;
  std::vector<NodePtr> args;
};

bool equal(const Node& a, const Node& b);

/// Syntax error. `offset` is the 1-based byte position of the offending token
/// (input length + 1 at end of input).
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what, std::set<std::string> expected = {});
  std::size_t offset;
  std::set<std::string> expected;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(std::size_t offset, const std::string& name);
  std::string identifier;
};

class ArityError : public ParseError {
 public:
  ArityError(std::size_t offset, const std::string& function, std::size_t expected, std::size_t got);
};

/// Non-finite or undefined result; `subexpression` is the failing node.
class EvalError : public Error {
 public:
  EvalError(const std::string& subexpr, const std::string& reason);
  std::string subexpression;
};

class Expr {
 public:
  Expr(NodePtr root, Dims dims) : root_(std::move(root)), dims_(dims) {}

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  const Dims& dims() const { return dims_; }
  /// Fully parenthesized text that parses back to the same tree.
  std::string str() const;

  bool operator==(const Expr& o) const { return dims_ == o.dims_ && equal(*root_, *o.root_); }

 private:
  NodePtr root_;
  Dims dims_;
};

/// `pi` is always defined; `constants` adds named values.
Expr parse(std::string_view text, Dims dims, const Constants& constants = {});

double eval_expr(const Expr& e, const Vec& x);

std::string to_string(const Node& node);

/// Several scalar expressions evaluated as one vector-valued function.
Vec eval_all(const std::vector<Expr>& exprs, const Vec& x);

}  // namespace pwacut::expr
