#pragma once

#include "pwacut/fitting.hpp"
#include "pwacut/geometry.hpp"
#include "pwacut/model.hpp"
#include "pwacut/partition.hpp"
#include "pwacut/sampling.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace pwacut {

enum class StopMetric { MaxRelErr, Gamma };

inline constexpr double kDegeneratePenalty = 1e3;
inline constexpr double kUndersampledPenalty = 10.0;

struct GenerationLog {
  std::size_t nc;
  std::size_t generation;
  double best_fitness;
  double gamma;
  std::size_t P;
};

struct SearchConfig {
  double lambda = 1e-3;
  std::size_t population = 50;
  std::size_t generations = 60;
  double mutation_sigma = 0.15;
  /// Probability that an individual gene is perturbed in a child.
  double mutation_rate = 0.25;
  double crossover_rate = 0.7;
  std::size_t elitism = 2;
  std::uint64_t seed = 42;
  double tol_err = 0.05;
  std::size_t max_iter = 12;
  std::size_t samples_n = 5000;
  bool continuity = false;
  std::size_t nc_limit = kDefaultCutLimit;
  StopMetric metric = StopMetric::MaxRelErr;
  bool warm_start = true;
  /// 0 resolves through PWACUT_THREADS / hardware concurrency.
  std::size_t threads = 0;
  std::function<void(const GenerationLog&)> progress;
};

/// Throws Error on an invalid configuration.
void check_config(const SearchConfig& config);

/// Immutable state shared by all fitness evaluations of one run.
class SearchContext {
 public:
  SearchContext(const Domain& domain, const SampleSet& samples, const SearchConfig& config);

  const Domain& domain() const { return domain_; }
  const Hypersphere& sphere() const { return sphere_; }
  const SampleSet& samples() const { return samples_; }
  const FitData& fit_data() const { return fit_data_; }
  const SearchConfig& config() const { return config_; }
  const std::vector<Vec>& sample_points() const { return points_; }

 private:
  const Domain& domain_;
  Hypersphere sphere_;
  const SampleSet& samples_;
  FitData fit_data_;
  const SearchConfig& config_;
  std::vector<Vec> points_;
};

/// Everything derived from one genome.
struct GenomeEvaluation {
  double fitness = 0.0;
  std::size_t degenerate = 0;
  CutArrangement arrangement;
  FeasibilityMatrix sigma;
  RegionSet partition;
  std::vector<std::size_t> assignment;
  FitResult fit;
};

/// Gamma* + lambda P + penalties (1e3 per degenerate cut, 10 x fraction of
/// under-sampled regions). Lower is better.
GenomeEvaluation evaluate_genome_full(const AngleGenome& genome, const SearchContext& context);
double evaluate_genome(const AngleGenome& genome, const SearchContext& context);

struct GaResult {
  AngleGenome best;
  GenomeEvaluation evaluation;
  /// Best fitness after each generation (index 0 is the initial population).
  std::vector<double> generation_best;
};

/// Uniformly random genome within the angle bounds.
AngleGenome random_genome(std::size_t cuts, std::size_t dim, Rng& rng);
/// A cut whose hyperplane lies outside the box (a small cap around +x_1).
/// Only meaningful for dim >= 2.
std::vector<double> null_cut_genes(const Domain& domain, Rng& rng);

/// Generational GA over angle genomes with `cuts` hyperplanes. `warm` (with
/// cuts - 1 hyperplanes) seeds the initial population when given.
GaResult ga_optimize(std::size_t cuts, const SearchContext& context, const AngleGenome* warm = nullptr);

struct SearchOutcome {
  PwaModel model;
  double gamma = 0.0;
  double max_rel_err = 0.0;
  std::size_t nc = 0;
  std::size_t P = 0;
  bool tolerance_met = false;
  std::vector<HistoryEntry> history;
};

/// Escalates the number of cuts from one until the error metric meets
/// tol_err or max_iter rounds have run. Throws EvaluationFailure when F is
/// not finite on the samples.
SearchOutcome approximate(const VectorFunction& fn, const Domain& domain, const SearchConfig& config);

}  // namespace pwacut
