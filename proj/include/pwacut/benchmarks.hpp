#pragma once

#include "pwacut/expr.hpp"
#include "pwacut/geometry.hpp"
#include "pwacut/sampling.hpp"

#include <string>
#include <vector>

namespace pwacut {

class UnknownBenchmark : public Error {
 public:
  explicit UnknownBenchmark(const std::string& name) : Error("unknown benchmark '" + name + "'"), name(name) {}
  std::string name;
};

struct Benchmark {
  std::string name;
  std::vector<std::string> texts;  // one expression per output
  expr::Dims dims;
  Domain domain;
  expr::Constants constants;

  std::vector<expr::Expr> exprs() const;
  VectorFunction function() const;
};

/// Wraps parsed expressions as a vector function of the augmented point.
VectorFunction expression_function(std::vector<expr::Expr> exprs);

Benchmark builtin(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace pwacut
