#include <doctest.h>

#include "generators.hpp"
#include "helpers.hpp"

#include "pwacut/benchmarks.hpp"
#include "pwacut/expr.hpp"
#include "pwacut/sampling.hpp"

#include <cmath>
#include <numbers>

using namespace pwacut;
using namespace pwacut::expr;
using testing::vec;

namespace {

double ev(const std::string& text, const Vec& x = Vec(), Dims dims = {}) {
  if (dims.total() == 0) dims = {static_cast<std::size_t>(x.size()), 0};
  return eval_expr(parse(text, dims), x);
}

struct Case {
  const char* text;
  double value;
};

// x1 = 2, x2 = 3, x3 = -0.5
const Case kCases[] = {
    {"2+3*4^2", 50},
    {"-x1^2", -4},
    {"(-x1)^2", 4},
    {"2^3^2", 512},
    {"(2^3)^2", 64},
    {"10-4-3", 3},
    {"10-(4-3)", 9},
    {"64/4/2", 8},
    {"64/(4/2)", 32},
    {"2*3+4", 10},
    {"2+3*4", 14},
    {"(2+3)*4", 20},
    {"2*-3", -6},
    {"--x1", 2},
    {"-x1*x2", -6},
    {"-x1^x2", -8},
    {"x1^-1", 0.5},
    {"x2^x1^0", 3},
    {"x1*x2^2", 18},
    {"x1+x2*x3", 0.5},
    {"x1-x2+x3", -1.5},
    {"x1/x2*x2", 2},
    {"6/x2/x1", 1},
    {"-2^2", -4},
    {"1 - -1", 2},
    {"abs(x3)*4", 2},
    {"min(x1, x2)^2", 4},
    {"max(x1, -x2) - 1", 1},
    {"atan2(x1, x1)*4", std::numbers::pi},
    {"sqrt(x1^2 + 5)*exp(0)+log(1)", 3},
};

}  // namespace

TEST_CASE("precedence and associativity table") {
  const Vec x = vec({2, 3, -0.5});
  for (const auto& c : kCases) {
    INFO(c.text);
    CHECK(ev(c.text, x) == doctest::Approx(c.value).epsilon(1e-12));
  }
}

TEST_CASE("tree shapes") {
  const Expr e = parse("sin(x1 + u1^2)", {1, 1});
  CHECK(e.str() == "sin((x1 + (u1 ^ 2)))");
  const Node& root = e.root();
  CHECK(root.kind == Kind::Call);
  CHECK(root.function == Function::Sin);
  const Node& add = *root.args[0];
  CHECK(add.kind == Kind::Add);
  CHECK(add.args[0]->kind == Kind::Variable);
  CHECK(add.args[1]->kind == Kind::Power);
  CHECK(add.args[1]->args[0]->index == 1);

  CHECK(parse("x1 * cos(x2)", {2, 0}).str() == "(x1 * cos(x2))");
  CHECK(parse("  x1*  cos( x2 )", {2, 0}) == parse("x1*cos(x2)", {2, 0}));
  CHECK(parse("1.5e3 + .25", {}).str() == "(1500 + 0.25)");
}

TEST_CASE("syntax errors") {
  try {
    parse("x3 +", {3, 0});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
    CHECK(e.expected.count("number") == 1);
  }
  CHECK_THROWS_AS(parse("x1 x2", {2, 0}), ParseError);
  CHECK_THROWS_AS(parse("(x1", {1, 0}), ParseError);
  CHECK_THROWS_AS(parse("x1 # 2", {1, 0}), ParseError);
  try {
    parse("x1 + u2", {1, 1});
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.offset == 6);
    CHECK(e.identifier == "u2");
  }
  CHECK_THROWS_AS(parse("foo(x1)", {1, 0}), UnknownIdentifier);
  CHECK_THROWS_AS(parse("x0", {1, 0}), UnknownIdentifier);
  CHECK_THROWS_AS(parse("atan2(x1)", {1, 0}), ArityError);
  CHECK_THROWS_AS(parse("sin(x1, x1)", {1, 0}), ArityError);
}

TEST_CASE("evaluation") {
  CHECK(ev("sin(x1 + u1^2)", vec({0, 0}), {1, 1}) == 0.0);
  CHECK(ev("x1*cos(x2)", vec({2, std::numbers::pi})) == doctest::Approx(-2.0));
  CHECK(ev("atan2(1, -1)") == doctest::Approx(3 * std::numbers::pi / 4));
  CHECK(ev("log(exp(2))") == doctest::Approx(2.0));
  CHECK(ev("(-8)^(1/3*3)") == doctest::Approx(-8.0));
  CHECK(ev("(-2)^3") == doctest::Approx(-8.0));
  CHECK_THROWS_AS(ev("1/x1", vec({0})), EvalError);
  CHECK_THROWS_AS(ev("log(x1)", vec({0})), EvalError);
  CHECK_THROWS_AS(ev("log(-x1)", vec({1})), EvalError);
  CHECK_THROWS_AS(ev("(-2)^0.5"), EvalError);
  CHECK_THROWS_AS(ev("sqrt(-1)"), EvalError);
  CHECK_THROWS_AS(ev("exp(1000)"), EvalError);
  try {
    ev("x1 + 1/(x1 - 1)", vec({1}));
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.subexpression == "(1 / (x1 - 1))");
  }
  CHECK_THROWS_AS(eval_expr(parse("x1", {1, 0}), vec({1, 2})), Error);
}

TEST_CASE("print and parse round trip") {
  Rng rng(77);
  const Dims dims{3, 2};
  for (int t = 0; t < 1000; ++t) {
    const Expr e(testing::random_node(rng, 1 + static_cast<int>(rng.below(5)), dims), dims);
    const std::string text = e.str();
    const Expr back = parse(text, dims);
    INFO(text);
    CHECK(back == e);
    CHECK(back.str() == text);
  }
}

TEST_CASE("builtin benchmarks") {
  const Benchmark d = builtin("dubins");
  CHECK(d.function()(vec({1, 0}))[0] == doctest::Approx(1.0));
  CHECK(d.domain.upper()[1] == doctest::Approx(2 * std::numbers::pi));
  const Benchmark s = builtin("sine2d");
  CHECK(s.function()(vec({1, 1}))[0] == doctest::Approx(std::sin(2.0)));
  const Benchmark v = builtin("vehicle_vx");
  CHECK(v.dims == Dims{3, 3});
  CHECK(v.function()(vec({10, 0, 0, 0, 0, 0}))[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(v.function()(vec({0, 1, 0, 0, 0, 0})), EvalError);
  CHECK_THROWS_AS(builtin("nope"), UnknownBenchmark);

  for (const auto& name : builtin_names()) {
    const Benchmark b = builtin(name);
    SampleSet samples = sample_domain(b.domain, 100000, 5);
    CHECK_NOTHROW(evaluate_samples(samples, b.domain, b.function()));
  }
}
