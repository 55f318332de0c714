#include "pwacut/benchmarks.hpp"

#include <numbers>

namespace pwacut {

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

std::vector<expr::Expr> Benchmark::exprs() const {
  std::vector<expr::Expr> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(expr::parse(t, dims, constants));
  return out;
}

VectorFunction Benchmark::function() const { return expression_function(exprs()); }

VectorFunction expression_function(std::vector<expr::Expr> exprs) {
  return [exprs = std::move(exprs)](const Vec& x) { return expr::eval_all(exprs, x); };
}

Benchmark builtin(const std::string& name) {
  if (name == "sine2d")
    return {name, {"sin(x1 + u1^2)"}, {1, 1}, Domain(vec({-2, -2}), vec({2, 2})), {}};
  if (name == "dubins")
    return {name, {"x1*cos(x2)"}, {2, 0}, Domain(vec({-2, 0}), vec({2, 2 * std::numbers::pi})), {}};
  if (name == "vehicle_vx")
    return {name,
            {"(u1*cos(u3) + u2)/eta1 + eta2*(atan((x2 + eta3*x3)/x1) - u3)"},
            {3, 3},
            Domain(vec({5, -3, -1, -2000, -500, -0.5}), vec({30, 3, 1, 2000, 500, 0.5})),
            {{"eta1", 1970.0}, {"eta2", 64.36}, {"eta3", 1.48}}};
  throw UnknownBenchmark(name);
}

std::vector<std::string> builtin_names() { return {"sine2d", "dubins", "vehicle_vx"}; }

}  // namespace pwacut
