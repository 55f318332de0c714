#include <doctest.h>

#include "helpers.hpp"

#include "pwacut/errors.hpp"
#include "pwacut/parallel.hpp"
#include "pwacut/sampling.hpp"

#include <atomic>
#include <cmath>

using namespace pwacut;
using testing::vec;

TEST_CASE("radical inverse") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(2, 2) == 0.25);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(1, 3) == doctest::Approx(1.0 / 3));
}

TEST_CASE("single sample is reproducible") {
  const Domain D = testing::cube(2, -2, 2);
  const SampleSet a = sample_domain(D, 1, 42);
  const SampleSet b = sample_domain(D, 1, 42);
  REQUIRE(a.size() == 1);
  CHECK(a.points == b.points);
  CHECK(D.contains_working(a.point(0)));
}

TEST_CASE("uniformity and coverage") {
  const Domain D = testing::cube(2, -2, 2);
  const SampleSet s = sample_domain(D, 5000, 42);
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(std::abs(s.points.col(j).mean()) < 0.05);
    CHECK(s.points.col(j).minCoeff() < -2 + 0.02);
    CHECK(s.points.col(j).maxCoeff() > 2 - 0.02);
  }
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(D.contains_working(s.point(k)));
  CHECK_FALSE(sample_domain(D, 100, 1).points == sample_domain(D, 100, 2).points);
}

TEST_CASE("evaluation failures carry the point") {
  const Domain D(vec({-1}), vec({1}));
  SampleSet s = sample_domain(D, 50, 1);
  evaluate_samples(s, D, [](const Vec& x) { return Vec::Constant(1, 2 * x[0]); });
  CHECK(s.outdim() == 1);
  CHECK(s.values(3, 0) == doctest::Approx(2 * s.points(3, 0)));

  SampleSet bad = sample_domain(D, 50, 1);
  try {
    evaluate_samples(bad, D, [](const Vec& x) { return Vec::Constant(1, 1.0 / (x[0] > 0 ? 0.0 : 1.0)); });
    FAIL("expected EvaluationFailure");
  } catch (const EvaluationFailure& e) {
    REQUIRE(e.point.size() == 1);
    CHECK(e.point[0] > 0);
  }
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<std::atomic<int>> seen(1000);
  parallel_for(seen.size(), 4, [&](std::size_t i) { seen[i]++; });
  for (auto& s : seen) CHECK(s.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw Error("boom");
                  }),
                  Error);
  CHECK(resolve_threads(3) == 3);
}
