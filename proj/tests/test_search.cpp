#include <doctest.h>

#include "helpers.hpp"

#include "pwacut/errors.hpp"
#include "pwacut/search.hpp"

#include <cmath>

using namespace pwacut;
using testing::vec;

namespace {

struct Fixture {
  Domain domain;
  SampleSet samples;
  SearchConfig config;
};

Fixture fixture(const Domain& D, const VectorFunction& fn, std::size_t N = 1000) {
  Fixture f{D, sample_domain(D, N, 42), {}};
  evaluate_samples(f.samples, D, fn);
  f.config.population = 30;
  f.config.generations = 30;
  return f;
}

const VectorFunction kAffine = [](const Vec& x) { return Vec::Constant(1, 1.5 * x[0] - 0.5 * x[1] + 2); };
const VectorFunction kSine = [](const Vec& x) { return Vec::Constant(1, std::sin(x[0] + x[1] * x[1])); };

}  // namespace

TEST_CASE("genomes that miss the box reduce to one region") {
  auto f = fixture(testing::cube(2, -2, 2), kSine);
  f.config.lambda = 0.0;
  const SearchContext ctx(f.domain, f.samples, f.config);
  Rng rng(1);
  std::vector<double> genes;
  for (int i = 0; i < 2; ++i) {
    const auto g = null_cut_genes(f.domain, rng);
    genes.insert(genes.end(), g.begin(), g.end());
  }
  const AngleGenome genome(2, 2, genes);
  const auto ev = evaluate_genome_full(genome, ctx);
  REQUIRE(ev.partition.count == 1);
  const FitResult one = fit_unconstrained(ctx.fit_data(), 1, std::vector<std::size_t>(f.samples.size(), 0));
  CHECK(ev.fitness == doctest::Approx(one.gamma).epsilon(1e-12));
}

TEST_CASE("degenerate genomes are penalized") {
  auto f = fixture(testing::cube(2, -2, 2), kSine);
  const SearchContext ctx(f.domain, f.samples, f.config);
  const AngleGenome g(1, 2, {0.4, 0.4});
  CHECK(evaluate_genome(g, ctx) >= kDegeneratePenalty);
}

TEST_CASE("affine targets cost only the region penalty") {
  auto f = fixture(testing::cube(2, -2, 2), kAffine);
  const SearchContext ctx(f.domain, f.samples, f.config);
  Rng rng(8);
  for (int t = 0; t < 5; ++t) {
    const auto ev = evaluate_genome_full(random_genome(3, 2, rng), ctx);
    if (ev.degenerate || ev.fit.undersampled_count()) continue;
    CHECK(ev.fitness == doctest::Approx(1e-3 * static_cast<double>(ev.partition.count)).epsilon(1e-6));
  }
  const GaResult r = ga_optimize(1, ctx);
  CHECK(r.generation_best.back() <= 2e-3 + 1e-8);
}

TEST_CASE("a single cut finds a kink") {
  const Domain D = testing::cube(2, -2, 2);
  auto f = fixture(D, [](const Vec& x) { return Vec::Constant(1, std::abs(x[0] - 1)); }, 2000);
  f.config.continuity = true;
  f.config.population = 50;
  f.config.generations = 60;
  const SearchContext ctx(f.domain, f.samples, f.config);
  const GaResult r = ga_optimize(1, ctx);
  CHECK(r.evaluation.fit.gamma <= 1e-6);
  const Vec& h = r.evaluation.arrangement.planes[0].h;
  CHECK(h[0] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("the GA is deterministic and elitist") {
  auto f = fixture(testing::cube(2, -2, 2), kSine);
  f.config.threads = 1;
  const SearchContext ctx(f.domain, f.samples, f.config);
  const GaResult a = ga_optimize(2, ctx);
  auto f3 = f;
  f3.config.threads = 3;
  const SearchContext ctx3(f3.domain, f3.samples, f3.config);
  const GaResult b = ga_optimize(2, ctx3);
  CHECK(a.best == b.best);
  CHECK(a.generation_best == b.generation_best);
  for (std::size_t g = 1; g < a.generation_best.size(); ++g) CHECK(a.generation_best[g] <= a.generation_best[g - 1]);
  CHECK(a.best.within_bounds());
}

TEST_CASE("warm starts never lose ground") {
  auto f = fixture(testing::cube(2, -2, 2), kSine);
  const SearchContext ctx(f.domain, f.samples, f.config);
  const GaResult one = ga_optimize(1, ctx);
  const GaResult two = ga_optimize(2, ctx, &one.best);
  CHECK(two.generation_best.front() <= one.generation_best.back() + 1e-12);
}

TEST_CASE("approximate stops at one cut for affine targets") {
  SearchConfig c;
  c.population = 20;
  c.generations = 10;
  c.tol_err = 0.01;
  const auto out = approximate(kAffine, testing::cube(2, -2, 2), c);
  CHECK(out.tolerance_met);
  CHECK(out.nc == 1);
  CHECK(out.max_rel_err < 1e-8);
  CHECK(out.model.tolerance_met == std::optional<bool>(true));
  CHECK(validate(out.model).ok());
}

TEST_CASE("unreachable tolerance returns the best model") {
  SearchConfig c;
  c.population = 20;
  c.generations = 10;
  c.tol_err = 1e-12;
  c.max_iter = 2;
  c.continuity = true;
  const auto out = approximate(kSine, testing::cube(2, -2, 2), c);
  CHECK_FALSE(out.tolerance_met);
  REQUIRE(out.history.size() == 2);
  CHECK(out.history[0].nc == 1);
  CHECK(out.history[1].nc == 2);
  CHECK(out.history[1].fitness <= out.history[0].fitness + 1e-12);
  CHECK(validate(out.model).ok());
}

TEST_CASE("configuration checks") {
  SearchConfig c;
  c.population = 1;
  CHECK_THROWS_AS(check_config(c), Error);
  c = {};
  c.tol_err = 1.5;
  CHECK_THROWS_AS(check_config(c), Error);
  c = {};
  c.max_iter = 0;
  CHECK_THROWS_AS(check_config(c), Error);
  CHECK_NOTHROW(check_config(SearchConfig{}));
}

TEST_CASE("non-finite targets abort the search") {
  SearchConfig c;
  c.population = 4;
  c.generations = 1;
  const VectorFunction bad = [](const Vec& x) { return Vec::Constant(1, std::log(x[0] - 0.5)); };
  CHECK_THROWS_AS(approximate(bad, Domain(vec({0, 0}), vec({1, 1})), c), EvaluationFailure);
}
