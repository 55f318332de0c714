#include "pwacut/search.hpp"

#include "pwacut/errors.hpp"
#include "pwacut/parallel.hpp"
#include "pwacut/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace pwacut {

namespace {

struct Score {
  double fitness = std::numeric_limits<double>::infinity();
  double gamma = 0.0;
  std::size_t P = 0;
};

Score score_of(const GenomeEvaluation& ev) { return {ev.fitness, ev.fit.gamma, ev.partition.count}; }

std::vector<Score> score_all(const std::vector<AngleGenome>& pop, std::size_t first, const SearchContext& ctx,
                             std::vector<Score> scores) {
  scores.resize(pop.size());
  parallel_for(pop.size() - first, resolve_threads(ctx.config().threads),
               [&](std::size_t i) { scores[first + i] = score_of(evaluate_genome_full(pop[first + i], ctx)); });
  return scores;
}

std::size_t tournament(const std::vector<Score>& scores, Rng& rng) {
  constexpr int kSize = 3;
  std::size_t best = rng.below(scores.size());
  for (int t = 1; t < kSize; ++t) {
    const std::size_t c = rng.below(scores.size());
    if (scores[c].fitness < scores[best].fitness || (scores[c].fitness == scores[best].fitness && c < best)) best = c;
  }
  return best;
}

void perturb(AngleGenome& g, std::size_t k, double sigma, Rng& rng) {
  auto& genes = g.raw();
  const double ub = g.gene_upper_bound(k);
  double v = genes[k] + sigma * rng.normal();
  if (ub > std::numbers::pi + 1e-12) {
    v = std::fmod(v, ub);
    if (v < 0.0) v += ub;
  } else {
    v = std::clamp(v, 0.0, ub);
  }
  genes[k] = v;
}

void mutate(AngleGenome& g, const SearchConfig& cfg, Rng& rng) {
  const double sigma = cfg.mutation_sigma;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (rng.uniform() < cfg.mutation_rate) perturb(g, k, sigma, rng);
}

AngleGenome crossover(const AngleGenome& a, const AngleGenome& b, Rng& rng) {
  AngleGenome child = a;
  const std::size_t block = a.genes_per_cut();
  for (std::size_t i = 0; i < a.cuts(); ++i) {
    if (rng.uniform() < 0.5) continue;
    std::copy_n(b.raw().begin() + static_cast<std::ptrdiff_t>(i * block), block,
                child.raw().begin() + static_cast<std::ptrdiff_t>(i * block));
  }
  return child;
}

AngleGenome pad_genome(const AngleGenome& base, const std::vector<double>& extra) {
  std::vector<double> genes = base.raw();
  genes.insert(genes.end(), extra.begin(), extra.end());
  return AngleGenome(base.cuts() + 1, base.dim(), std::move(genes));
}

std::vector<std::size_t> ranking(const std::vector<Score>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].fitness < scores[b].fitness; });
  return order;
}

}  // namespace

void check_config(const SearchConfig& c) {
  if (c.population < 2) throw Error("population must be at least 2");
  if (!(c.tol_err > 0.0 && c.tol_err < 1.0)) throw Error("tolerance must lie in (0, 1)");
  if (c.max_iter < 1) throw Error("max_iter must be at least 1");
  if (!(c.lambda >= 0.0)) throw Error("lambda must be nonnegative");
  if (c.samples_n < 1) throw Error("sample count must be at least 1");
  if (c.elitism > c.population) throw Error("elitism exceeds the population size");
  if (!(c.mutation_sigma >= 0.0)) throw Error("mutation sigma must be nonnegative");
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) throw Error("crossover rate must lie in [0, 1]");
  if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0)) throw Error("mutation rate must lie in [0, 1]");
  if (c.nc_limit < 1) throw Error("cut limit must be at least 1");
}

SearchContext::SearchContext(const Domain& domain, const SampleSet& samples, const SearchConfig& config)
    : domain_(domain), sphere_(enclosing_hypersphere(domain)), samples_(samples), fit_data_(samples, domain), config_(config) {
  points_.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) points_.push_back(samples.point(k));
}

GenomeEvaluation evaluate_genome_full(const AngleGenome& genome, const SearchContext& ctx) {
  const auto& cfg = ctx.config();
  GenomeEvaluation ev;
  ev.arrangement = decode_genome(genome, ctx.sphere());
  ev.degenerate = ev.arrangement.degenerate_count();
  if (ev.degenerate > 0) {
    ev.fitness = kDegeneratePenalty * static_cast<double>(ev.degenerate) + 1.0;
    return ev;
  }
  ChamberOptions opts;
  opts.cut_limit = cfg.nc_limit;
  opts.witnesses = ctx.sample_points();
  ev.sigma = chambers(ev.arrangement, ctx.domain(), opts);
  ev.partition = regions(ev.arrangement, ev.sigma);
  ev.assignment = assign_samples(ev.arrangement, ev.sigma, ctx.samples());
  ev.fit = cfg.continuity ? fit_continuous(ctx.fit_data(), ev.partition.adjacency, ev.arrangement, ev.assignment)
                          : fit_unconstrained(ctx.fit_data(), ev.partition.count, ev.assignment);
  const auto P = static_cast<double>(ev.partition.count);
  ev.fitness = ev.fit.gamma + cfg.lambda * P +
               kUndersampledPenalty * static_cast<double>(ev.fit.undersampled_count()) / P;
  return ev;
}

double evaluate_genome(const AngleGenome& genome, const SearchContext& context) {
  return evaluate_genome_full(genome, context).fitness;
}

AngleGenome random_genome(std::size_t cuts, std::size_t dim, Rng& rng) {
  AngleGenome g(cuts, dim);
  for (std::size_t k = 0; k < g.size(); ++k) g.raw()[k] = rng.uniform(0.0, g.gene_upper_bound(k));
  return g;
}

std::vector<double> null_cut_genes(const Domain& domain, Rng& rng) {
  const std::size_t d = domain.dim();
  const double rho = enclosing_hypersphere(domain).radius;
  const double half1 = domain.half_width()[0];
  // Every generating point has x_1 = rho cos(delta), halfway between the box
  // face and the sphere, so the plane x_1 = rho cos(delta) misses the box.
  const double delta = std::acos(0.5 * (half1 / rho + 1.0));
  const Hypersphere sphere{rho};
  for (int attempt = 0;; ++attempt) {
    AngleGenome g(1, d);
    for (std::size_t k = 0; k < d; ++k) {
      if (d == 2) {
        g.at(0, k, 0) = k == 0 ? delta : 2.0 * std::numbers::pi - delta;
        continue;
      }
      g.at(0, k, 0) = delta;
      for (std::size_t j = 1; j + 1 < d; ++j) g.at(0, k, j) = rng.uniform(0.0, AngleGenome::upper_bound(d, j));
    }
    if (decode_genome(g, sphere).degenerate_count() == 0 || attempt > 20) return g.raw();
  }
}

GaResult ga_optimize(std::size_t cuts, const SearchContext& ctx, const AngleGenome* warm) {
  if (cuts < 1) throw Error("at least one cut is required");
  const auto& cfg = ctx.config();
  const std::size_t d = ctx.domain().dim();
  Rng rng(mix_seed(cfg.seed, cuts));

  std::vector<AngleGenome> pop;
  pop.reserve(cfg.population);
  if (warm && cfg.warm_start && warm->cuts() + 1 == cuts && warm->dim() == d) {
    if (d >= 2) pop.push_back(pad_genome(*warm, null_cut_genes(ctx.domain(), rng)));
    // Most of the population keeps the previous cuts and tries a new one; the
    // rest is random to keep some diversity.
    while (pop.size() < std::max<std::size_t>(1, cfg.population * 9 / 10))
      pop.push_back(pad_genome(*warm, random_genome(1, d, rng).raw()));
  }
  while (pop.size() < cfg.population) pop.push_back(random_genome(cuts, d, rng));

  std::vector<Score> scores = score_all(pop, 0, ctx, {});
  GaResult out;
  for (std::size_t gen = 0;; ++gen) {
    const auto order = ranking(scores);
    const Score& best = scores[order.front()];
    out.generation_best.push_back(best.fitness);
    if (cfg.progress) cfg.progress({cuts, gen, best.fitness, best.gamma, best.P});
    if (gen == cfg.generations) {
      out.best = pop[order.front()];
      break;
    }

    std::vector<AngleGenome> next;
    std::vector<Score> kept;
    next.reserve(cfg.population);
    for (std::size_t e = 0; e < cfg.elitism; ++e) {
      next.push_back(pop[order[e]]);
      kept.push_back(scores[order[e]]);
    }
    while (next.size() < cfg.population) {
      const AngleGenome& a = pop[tournament(scores, rng)];
      const AngleGenome& b = pop[tournament(scores, rng)];
      AngleGenome child = rng.uniform() < cfg.crossover_rate ? crossover(a, b, rng) : a;
      mutate(child, cfg, rng);
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    scores = score_all(pop, kept.size(), ctx, std::move(kept));
  }
  out.evaluation = evaluate_genome_full(out.best, ctx);
  return out;
}

SearchOutcome approximate(const VectorFunction& fn, const Domain& domain, const SearchConfig& config) {
  check_config(config);
  SampleSet samples = sample_domain(domain, config.samples_n, config.seed);
  evaluate_samples(samples, domain, fn);
  const SearchContext ctx(domain, samples, config);

  auto metric_of = [&](const GenomeEvaluation& ev) {
    return config.metric == StopMetric::Gamma ? ev.fit.gamma : ev.fit.max_rel_err;
  };

  SearchOutcome out{make_model(domain, {}, FeasibilityMatrix(0, {0}), {}, config.continuity), 0.0, 0.0, 0, 0, false, {}};
  std::optional<GenomeEvaluation> best;
  AngleGenome previous;
  for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
    const std::size_t cuts = iter;
    if (cuts > config.nc_limit) break;
    GaResult ga = ga_optimize(cuts, ctx, iter > 1 ? &previous : nullptr);
    previous = ga.best;
    GenomeEvaluation& ev = ga.evaluation;
    out.history.push_back({cuts, ev.fitness, ev.fit.gamma, ev.fit.max_rel_err, ev.partition.count});
    if (ev.degenerate > 0) continue;
    const bool met = metric_of(ev) <= config.tol_err;
    if (!best || metric_of(ev) < metric_of(*best) || met) best = std::move(ev);
    if (met) {
      out.tolerance_met = true;
      break;
    }
  }
  if (!best) throw NumericalFailure("no non-degenerate arrangement was found");

  out.model = make_model(domain, best->arrangement, best->sigma, best->fit.modes, config.continuity);
  out.model.metadata.seed = config.seed;
  out.model.metadata.gamma = best->fit.gamma;
  out.model.metadata.max_rel_err = best->fit.max_rel_err;
  out.model.history = out.history;
  out.model.tolerance_met = out.tolerance_met;
  out.gamma = best->fit.gamma;
  out.max_rel_err = best->fit.max_rel_err;
  out.nc = best->arrangement.size();
  out.P = best->partition.count;
  return out;
}

}  // namespace pwacut
