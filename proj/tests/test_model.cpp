#include <doctest.h>

#include "generators.hpp"
#include "helpers.hpp"

#include "pwacut/errors.hpp"
#include "pwacut/fitting.hpp"
#include "pwacut/model.hpp"

#include <json.hpp>

#include <cmath>

using namespace pwacut;
using testing::vec;

namespace {

PwaModel affine_model() {
  const Domain D(vec({-4}), vec({4}));
  AffineMode m{Mat::Constant(1, 1, 2.0), Vec::Constant(1, 1.0)};
  return make_model(D, {}, FeasibilityMatrix(0, {0}), {m}, false);
}

}  // namespace

TEST_CASE("evaluate an affine model") {
  const PwaModel m = affine_model();
  CHECK(evaluate(m, vec({3}))[0] == 7.0);
  CHECK_THROWS_AS(evaluate(m, vec({4.5})), OutOfDomain);
  CHECK_THROWS_AS(evaluate(m, vec({1, 1})), OutOfDomain);
  CHECK(validate(m).ok());
}

TEST_CASE("shifted domains evaluate in the working frame") {
  const Domain D(vec({0, 10}), vec({4, 20}));
  AffineMode m{Mat(1, 2), Vec::Constant(1, 0.0)};
  m.J << 1, 1;
  const PwaModel model = make_model(D, {}, FeasibilityMatrix(0, {0}), {m}, false);
  CHECK(evaluate(model, vec({2, 15}))[0] == 0.0);
  CHECK(evaluate(model, vec({4, 20}))[0] == 7.0);
}

TEST_CASE("continuous models agree on facets") {
  const Domain D = testing::cube(2, -2, 2);
  const auto arr = CutArrangement::from_vectors({vec({1, 0}), vec({0, 1})});
  const FeasibilityMatrix S = chambers(arr, D);
  REQUIRE(S.columns() == 4);
  // Hinges max(0, x1 - 1) and max(0, x2 - 1) on top of an affine base.
  std::vector<AffineMode> modes;
  for (std::size_t p = 0; p < 4; ++p) {
    AffineMode m{Mat(1, 2), Vec::Constant(1, 0.3)};
    m.J << 0.5, -1;
    if (S.at(0, p)) m.J(0, 0) += 2, m.K[0] -= 2;
    if (S.at(1, p)) m.J(0, 1) -= 3, m.K[0] += 3;
    modes.push_back(m);
  }
  const PwaModel model = make_model(D, arr, S, modes, true);
  const auto rep = validate(model);
  CHECK(rep.ok());
  CHECK(rep.continuity_residual <= 1e-12);
  CHECK(rep.jump.points > 0);
  CHECK(rep.jump.max_jump <= 1e-12);
  const Vec x = vec({1.0, -0.7});
  CHECK(std::abs(modes[0](x)[0] - modes[2](x)[0]) <= 1e-8);

  Rng rng(4);
  for (const auto& e : model.adjacency.edges()) {
    const auto pts = sample_facet(model, e.p, e.plane, 50, rng);
    REQUIRE(pts.size() == 50);
    for (const auto& y : pts) {
      CHECK(std::abs(arr.planes[e.plane].h.dot(y) - 1.0) <= 1e-9);
      CHECK(D.contains_working(y, 1e-7));
    }
  }

  PwaModel broken = model;
  broken.modes[3].K[0] += 0.1;
  const auto bad = validate(broken);
  CHECK_FALSE(bad.ok());
  CHECK(bad.continuity_residual == doctest::Approx(0.1));
}

TEST_CASE("duplicated sigma columns are reported") {
  const Domain D = testing::cube(2, -2, 2);
  const auto arr = CutArrangement::from_vectors({vec({1, 0})});
  const FeasibilityMatrix S(1, {0, 1, 1});
  AffineMode m{Mat::Zero(1, 2), Vec::Zero(1)};
  const PwaModel model = make_model(D, arr, S, {m, m, m}, false);
  const auto rep = validate(model, {2000, 1, 100, nullptr});
  CHECK(rep.multiply_assigned > 0);
  CHECK_FALSE(rep.ok());

  PwaModel missing = make_model(D, arr, FeasibilityMatrix(1, {0}), {m}, false);
  const auto rep2 = validate(missing, {2000, 1, 100, nullptr});
  CHECK(rep2.unassigned > 0);
}

TEST_CASE("validate recomputes the error with a function") {
  const PwaModel m = affine_model();
  const VectorFunction f = [](const Vec& x) { return Vec::Constant(1, 2 * x[0] + 1); };
  ValidateOptions opt;
  opt.function = &f;
  const auto rep = validate(m, opt);
  REQUIRE(rep.max_rel_err.has_value());
  CHECK(*rep.max_rel_err < 1e-15);
}

TEST_CASE("evaluate matches the fitting predictions") {
  const Domain D = testing::cube(2, -2, 2);
  SampleSet s = sample_domain(D, 1000, 3);
  evaluate_samples(s, D, [](const Vec& x) { return Vec::Constant(1, std::sin(x[0] + x[1] * x[1])); });
  const auto arr = CutArrangement::from_vectors({vec({0.7, 0.2}), vec({-0.3, 0.9})});
  const FeasibilityMatrix S = chambers(arr, D);
  const auto assignment = assign_samples(arr, S, s);
  const FitResult fit = fit_unconstrained(FitData(s, D), S.columns(), assignment);
  const PwaModel model = make_model(D, arr, S, fit.modes, false);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Vec x = s.point(k);
    CHECK(evaluate(model, D.to_original(x)) == fit.modes[assignment[k]](x));
  }
}

TEST_CASE("serialization round trip") {
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    const PwaModel m = testing::random_model(rng);
    const std::string text = serialize(m);
    const PwaModel back = deserialize(text);
    CHECK(back == m);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("schema errors carry a path") {
  const std::string good = serialize(affine_model());
  auto j = nlohmann::json::parse(good);
  j.erase("modes");
  try {
    deserialize(j.dump());
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path == "/modes");
  }
  j = nlohmann::json::parse(good);
  j["modes"][0]["K"] = "x";
  try {
    deserialize(j.dump());
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path.rfind("/modes/0/K", 0) == 0);
  }
  CHECK_THROWS_AS(deserialize("{"), SchemaError);
  j = nlohmann::json::parse(good);
  j["version"] = 7;
  CHECK_THROWS_AS(deserialize(j.dump()), SchemaError);
}

TEST_CASE("example 2 partition export") {
  const Domain D = testing::cube(3, -2, 2);
  const auto arr = testing::example2();
  const FeasibilityMatrix S = chambers(arr, D);
  const std::vector<AffineMode> zero(S.columns(), AffineMode{Mat::Zero(1, 3), Vec::Zero(1)});
  const auto j = nlohmann::json::parse(serialize(make_model(D, arr, S, zero, false)));
  CHECK(j["sigma"] == nlohmann::json(testing::example2_sigma()));
  CHECK(j["adjacency"] == nlohmann::json(testing::example2_adjacency()));
  const auto expected = nlohmann::json::parse(R"([
    {"halfspaces": [{"i": 1, "sigma": 0}, {"i": 2, "sigma": 0}, {"i": 3, "sigma": 0}]},
    {"halfspaces": [{"i": 1, "sigma": 0}, {"i": 3, "sigma": 1}]},
    {"halfspaces": [{"i": 2, "sigma": 1}]},
    {"halfspaces": [{"i": 1, "sigma": 1}, {"i": 3, "sigma": 0}]},
    {"halfspaces": [{"i": 1, "sigma": 1}, {"i": 3, "sigma": 1}]}])");
  CHECK(j["regions"] == expected);
  CHECK(j["hyperplanes"][1] == nlohmann::json::parse("[0.1, -0.5, -0.2]"));
}
