#include <doctest.h>

#include "helpers.hpp"

#include "pwacut/errors.hpp"
#include "pwacut/partition.hpp"

using namespace pwacut;
using testing::vec;

namespace {

CutConstraint lt(const Vec& h) { return {h, Sense::StrictLess}; }
CutConstraint ge(const Vec& h) { return {h, Sense::GreaterEq}; }

}  // namespace

TEST_CASE("lp feasibility") {
  const Domain D = testing::cube(2, -2, 2);
  CHECK(lp_feasible({}, D));
  const Vec h = vec({0.5, 0.5});
  const std::vector<CutConstraint> both = {lt(h), ge(h)};
  CHECK_FALSE(lp_feasible(both, D));
  const std::vector<CutConstraint> far = {ge(vec({0.1, 0.1}))};  // needs x1 + x2 >= 10
  CHECK_FALSE(lp_feasible(far, D));

  const auto arr = testing::example2();
  const Domain C = testing::cube(3, -2, 2);
  const std::vector<CutConstraint> absent = {lt(arr.planes[0].h), ge(arr.planes[1].h), ge(arr.planes[2].h)};
  CHECK_FALSE(lp_feasible(absent, C));
  const std::vector<CutConstraint> present = {lt(arr.planes[0].h), lt(arr.planes[1].h), ge(arr.planes[2].h)};
  CHECK(lp_feasible(present, C));
}

TEST_CASE("interior point lies inside") {
  const Domain D = testing::cube(2, -2, 2);
  const std::vector<CutConstraint> cs = {ge(vec({1, 0}))};  // x1 >= 1
  double depth = 0;
  const auto x = interior_point(cs, D, &depth);
  REQUIRE(x.has_value());
  CHECK((*x)[0] > 1.0);
  CHECK(depth > 0.1);
  const std::vector<CutConstraint> none = {ge(vec({0.1, 0}))};
  CHECK_FALSE(interior_point(none, D).has_value());
}

TEST_CASE("example 2 chambers, adjacency and regions") {
  const auto arr = testing::example2();
  const Domain D = testing::cube(3, -2, 2);
  const FeasibilityMatrix S = chambers(arr, D);
  CHECK(S.rows() == testing::example2_sigma());
  CHECK(chambers_exhaustive(arr, D) == S);

  const AdjacencyMatrix A = adjacency(S);
  CHECK(A.rows() == testing::example2_adjacency());

  const RegionSet R = regions(arr, S);
  CHECK(R.count == 5);
  using H = Halfspace;
  const std::vector<std::vector<H>> expected = {
      {{0, 0}, {1, 0}, {2, 0}}, {{0, 0}, {2, 1}}, {{1, 1}}, {{0, 1}, {2, 0}}, {{0, 1}, {2, 1}}};
  for (std::size_t p = 0; p < 5; ++p) {
    CHECK(R.regions[p].id == p);
    CHECK(R.regions[p].halfspaces == expected[p]);
  }
}

TEST_CASE("small chamber cases") {
  const Domain D = testing::cube(2, -2, 2);
  const auto one = CutArrangement::from_vectors({vec({1, 0})});
  CHECK(chambers(one, D).rows() == std::vector<std::vector<int>>{{0, 1}});
  const auto miss = CutArrangement::from_vectors({vec({0.1, 0.1})});
  CHECK(chambers(miss, D).rows() == std::vector<std::vector<int>>{{0}});
  CHECK(adjacency(chambers(miss, D)).rows() == std::vector<std::vector<int>>{{0}});
  CHECK(adjacency(chambers(one, D)).rows() == std::vector<std::vector<int>>{{0, 1}, {1, 0}});
  const RegionSet R = regions(one, chambers(one, D));
  CHECK(R.regions[0].halfspaces.size() == 1);
  CHECK(R.regions[1].halfspaces.size() == 1);

  std::vector<Vec> many(21, vec({1, 0}));
  CHECK_THROWS_AS(chambers(CutArrangement::from_vectors(many), D), TooManyCuts);
}

TEST_CASE("locate chamber") {
  const auto arr = testing::example2();
  const Domain D = testing::cube(3, -2, 2);
  const FeasibilityMatrix S = chambers(arr, D);
  const std::size_t p = locate_chamber(arr, S, vec({0, 0, 0}));
  CHECK(S.column(p) == std::vector<int>{0, 0, 0});

  const auto one = CutArrangement::from_vectors({vec({1, 0})});
  const Domain D2 = testing::cube(2, -2, 2);
  const FeasibilityMatrix S1 = chambers(one, D2);
  CHECK(S1.column(locate_chamber(one, S1, vec({1, 0.5})))[0] == 1);

  for (int v = 0; v < 8; ++v) {
    const Vec x = vec({v & 1 ? 2.0 : -2.0, v & 2 ? 2.0 : -2.0, v & 4 ? 2.0 : -2.0});
    CHECK(locate_chamber(arr, S, x) < S.columns());
  }
}

TEST_CASE("random arrangements respect the partition invariants") {
  Rng rng(2024);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 2 + t % 3;
    const std::size_t nc = 1 + rng.below(6);
    const Domain D = testing::cube(d, -1.5, 1.5);
    std::vector<Vec> hs;
    for (std::size_t i = 0; i < nc; ++i) hs.push_back(testing::random_cut(D, rng));
    const auto arr = CutArrangement::from_vectors(hs);
    const FeasibilityMatrix S = chambers(arr, D);
    CHECK(S == chambers_exhaustive(arr, D));
    CHECK(S.columns() <= zaslavsky_bound(nc, d));
    for (std::size_t p = 1; p < S.columns(); ++p) CHECK(S.code(p - 1) < S.code(p));

    const AdjacencyMatrix A = adjacency(S);
    for (std::size_t p = 0; p < A.size(); ++p) {
      CHECK(A.at(p, p) == 0);
      for (std::size_t q = 0; q < A.size(); ++q) CHECK(A.at(p, q) == A.at(q, p));
    }
    for (const auto& e : A.edges()) {
      const auto facet = facet_constraints(arr, S, e.p, e.plane);
      CHECK(lp_feasible(facet, D));
    }
    std::vector<std::size_t> hits(S.columns(), 0);
    for (int k = 0; k < 2000; ++k) {
      const Vec x = testing::random_point(D, rng);
      const auto code = sigma_code(arr, x);
      const auto found = S.find(code);
      REQUIRE(found.has_value());
      CHECK(locate_chamber(arr, S, x) == *found);
      ++hits[*found];
    }
  }
}

TEST_CASE("zaslavsky bound") {
  CHECK(zaslavsky_bound(3, 2) == 7);
  CHECK(zaslavsky_bound(2, 3) == 4);
  CHECK(zaslavsky_bound(8, 4) == 1 + 8 + 28 + 56 + 70);
}

TEST_CASE("feasibility matrix lookups") {
  const FeasibilityMatrix S = FeasibilityMatrix::from_rows(testing::example2_sigma());
  CHECK(S.cuts() == 3);
  CHECK(S.columns() == 5);
  CHECK(S.code(4) == 0b101);
  CHECK(S.find(0b100) == std::optional<std::size_t>(3));
  CHECK_FALSE(S.find(0b011).has_value());
}
