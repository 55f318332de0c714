#pragma once

#include "pwacut/geometry.hpp"
#include "pwacut/partition.hpp"
#include "pwacut/sampling.hpp"

#include <span>
#include <vector>

namespace pwacut {

inline constexpr double kRidge = 1e-8;

/// f_p(x) = J x + K in the working frame.
struct AffineMode {
  Mat J;  // n x d
  Vec K;  // n

  Vec operator()(const Vec& x) const { return J * x + K; }
  bool operator==(const AffineMode& o) const { return J == o.J && K == o.K; }
};

struct CostValue {
  double gamma = 0.0;
  double max_rel_err = 0.0;
};

/// Continuity multiplier of an adjacent pair: J_p - J_q = c h^T, K_p - K_q = -c.
struct BoundaryCoupling {
  std::size_t p;
  std::size_t q;
  std::size_t plane;  // 0-based
  Vec c;
};

struct FitResult {
  std::vector<AffineMode> modes;
  double gamma = 0.0;
  double max_rel_err = 0.0;
  std::vector<BoundaryCoupling> couplings;
  std::vector<std::size_t> region_samples;
  /// Regions holding fewer than d + 1 samples.
  std::vector<bool> undersampled;

  std::size_t undersampled_count() const;
};

/// Sample-derived quantities shared by every fit over the same sample set:
/// box-normalized regressors [x / half; 1] and the relative-error weights
/// 1 / (|F|^2 + 1).
class FitData {
 public:
  FitData(const SampleSet& samples, const Domain& domain);

  const SampleSet& samples() const { return *samples_; }
  const Domain& domain() const { return *domain_; }
  const Mat& features() const { return features_; }
  const Vec& weights() const { return weights_; }

 private:
  const SampleSet* samples_;
  const Domain* domain_;
  Mat features_;  // N x (d + 1)
  Vec weights_;
};

/// Region index of every sample.
std::vector<std::size_t> assign_samples(const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                                        const SampleSet& samples);

/// gamma = mean_k |F - f|^2 / (|F|^2 + 1); max_rel_err = max_k |F - f| / sqrt(|F|^2 + 1).
CostValue cost(const SampleSet& samples, std::span<const AffineMode> modes, std::span<const std::size_t> assignment);

/// Independent weighted least squares per region with a small ridge.
FitResult fit_unconstrained(const FitData& data, std::size_t region_count, std::span<const std::size_t> assignment);

/// Joint weighted least squares with continuity imposed across every shared
/// facet, solved in the null space of the constraints.
FitResult fit_continuous(const FitData& data, const AdjacencyMatrix& adjacency, const CutArrangement& arrangement,
                         std::span<const std::size_t> assignment);

/// Continuity residuals of one adjacent pair, with c taken as the projection
/// of J_p - J_q onto h: |J_p - J_q - c h^T|_F and max_i |K_p - K_q + c|_i.
struct ContinuityResidual {
  double jacobian = 0.0;
  double offset = 0.0;
};
ContinuityResidual continuity_residual(const AffineMode& p, const AffineMode& q, const Vec& h);

}  // namespace pwacut
