#pragma once

#include "pwacut/geometry.hpp"

#include <cstdint>
#include <functional>

namespace pwacut {

/// Fixed point cloud over the domain with the target values at each point.
/// Points are rows of `points`, in the working frame.
struct SampleSet {
  Mat points;  // N x d
  Mat values;  // N x n
  std::uint64_t seed = 0;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
  std::size_t outdim() const { return static_cast<std::size_t>(values.cols()); }
  Vec point(std::size_t k) const { return points.row(static_cast<Eigen::Index>(k)).transpose(); }
};

/// Target function, called with a point in the original (problem) frame.
using VectorFunction = std::function<Vec(const Vec&)>;

/// Van der Corput radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, unsigned base);

/// N points of a Halton sequence with a seeded Cranley-Patterson rotation,
/// scaled to the box. Values are left empty.
SampleSet sample_domain(const Domain& domain, std::size_t count, std::uint64_t seed);

/// Fills `values` by calling F on every sample. Throws EvaluationFailure on
/// the first non-finite output.
void evaluate_samples(SampleSet& samples, const Domain& domain, const VectorFunction& fn);

}  // namespace pwacut
