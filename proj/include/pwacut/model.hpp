#pragma once

#include "pwacut/fitting.hpp"
#include "pwacut/geometry.hpp"
#include "pwacut/partition.hpp"
#include "pwacut/random.hpp"
#include "pwacut/sampling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pwacut {

inline constexpr int kModelFormatVersion = 1;

struct ModelMetadata {
  std::uint64_t seed = 0;
  std::size_t nc = 0;
  std::size_t P = 0;
  double gamma = 0.0;
  double max_rel_err = 0.0;
  std::string tool_version = PWACUT_VERSION;

  bool operator==(const ModelMetadata&) const = default;
};

/// One row of the cut-escalation history.
struct HistoryEntry {
  std::size_t nc = 0;
  double fitness = 0.0;
  double gamma = 0.0;
  double max_rel_err = 0.0;
  std::size_t P = 0;

  bool operator==(const HistoryEntry&) const = default;
};

/// Piecewise-affine model: chamber p of the arrangement carries mode p.
struct PwaModel {
  Domain domain;
  CutArrangement arrangement;
  FeasibilityMatrix sigma;
  AdjacencyMatrix adjacency;
  std::vector<Region> regions;
  std::vector<AffineMode> modes;
  bool continuity = false;
  ModelMetadata metadata;
  std::vector<HistoryEntry> history;
  std::optional<bool> tolerance_met;

  std::size_t dim() const { return domain.dim(); }
  std::size_t outdim() const { return modes.empty() ? 0 : static_cast<std::size_t>(modes.front().K.size()); }
  std::size_t region_count() const { return modes.size(); }

  bool operator==(const PwaModel& o) const;
};

/// Assembles a model from a partition and its fit; regions and adjacency are
/// derived from sigma.
PwaModel make_model(const Domain& domain, const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                    std::vector<AffineMode> modes, bool continuity);

/// f(x) for x in the original frame. Throws OutOfDomain.
Vec evaluate(const PwaModel& model, const Vec& x);
/// f(x) for x already in the working frame (no domain check).
Vec evaluate_working(const PwaModel& model, const Vec& x);
std::size_t locate(const PwaModel& model, const Vec& x_working);

/// Uniform samples on the facet between chambers p and q (sharing `plane`),
/// generated by hit-and-run restricted to h^T x = 1. Working frame.
std::vector<Vec> sample_facet(const PwaModel& model, std::size_t p, std::size_t plane, std::size_t count, Rng& rng);

struct FacetJump {
  std::size_t points = 0;
  double max_jump = 0.0;
};
/// Largest |f_p(x) - f_q(x)| over `total` facet points spread across all
/// adjacent pairs.
FacetJump facet_jump(const PwaModel& model, std::size_t total, std::uint64_t seed);

struct ValidationReport {
  std::size_t samples = 0;
  std::vector<std::size_t> region_samples;
  std::vector<std::size_t> empty_regions;   // LP re-check failed
  std::size_t unassigned = 0;               // matched no column
  std::size_t multiply_assigned = 0;        // matched more than one column
  std::vector<std::string> structure;       // inconsistencies among sigma, adjacency, regions
  bool continuity_checked = false;
  double continuity_jacobian = 0.0;
  double continuity_offset = 0.0;
  double continuity_residual = 0.0;         // max of the two above
  double continuity_tolerance = 0.0;
  FacetJump jump;
  double jump_tolerance = 0.0;
  std::optional<double> gamma;
  std::optional<double> max_rel_err;

  bool ok() const;
  std::vector<std::string> failures() const;
};

struct ValidateOptions {
  std::size_t samples_n = 10000;
  std::uint64_t seed = 1;
  std::size_t facet_points = 10000;
  const VectorFunction* function = nullptr;
};

ValidationReport validate(const PwaModel& model, const ValidateOptions& options = {});

std::string serialize(const PwaModel& model);
/// Throws SchemaError carrying a JSON pointer to the offending field.
PwaModel deserialize(std::string_view text);

}  // namespace pwacut
