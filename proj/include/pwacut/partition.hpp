#pragma once

#include "pwacut/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pwacut {

/// Strict inequalities are relaxed to h^T x <= 1 - eps * max(1, |h| rho).
inline constexpr double kStrictMargin = 1e-7;
inline constexpr std::size_t kDefaultCutLimit = 20;

enum class Sense { StrictLess, LessEq, GreaterEq, Equal };

struct CutConstraint {
  Vec h;
  Sense sense;
};

/// Feasibility of {x in box | h_i^T x (<|<=|>=|=) 1}, decided by phase-1 simplex.
bool lp_feasible(std::span<const CutConstraint> constraints, const Domain& domain, double eps = kStrictMargin);

/// A point of the constrained set as deep inside it as possible (maximal
/// slack to every inequality and to the box faces). Returns nothing when the
/// set is empty; `depth` receives the achieved slack in working units.
std::optional<Vec> interior_point(std::span<const CutConstraint> constraints, const Domain& domain,
                                  double* depth = nullptr);

/// Boolean n_c x P matrix. Column p is stored as the integer l whose binary
/// digits, most significant first, are sigma_1 ... sigma_nc. Columns produced
/// by `chambers` are in ascending l; hand-built matrices keep their order.
class FeasibilityMatrix {
 public:
  FeasibilityMatrix() = default;
  FeasibilityMatrix(std::size_t cuts, std::vector<std::uint64_t> codes);
  static FeasibilityMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t cuts() const { return cuts_; }
  std::size_t columns() const { return codes_.size(); }
  int at(std::size_t cut, std::size_t column) const {
    return static_cast<int>((codes_[column] >> (cuts_ - 1 - cut)) & 1U);
  }
  std::uint64_t code(std::size_t column) const { return codes_[column]; }
  const std::vector<std::uint64_t>& codes() const { return codes_; }
  std::vector<int> column(std::size_t p) const;
  std::vector<std::vector<int>> rows() const;

  /// Index of the column equal to `code`, if any.
  std::optional<std::size_t> find(std::uint64_t code) const;

  bool operator==(const FeasibilityMatrix& o) const { return cuts_ == o.cuts_ && codes_ == o.codes_; }

 private:
  std::size_t cuts_ = 0;
  std::vector<std::uint64_t> codes_;
  bool sorted_ = true;
};

/// Symmetric P x P matrix; entry (p, q) is the 1-based index of the hyperplane
/// shared by chambers p and q, or 0.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), a_(n * n, 0) {}
  static AdjacencyMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t size() const { return n_; }
  int& at(std::size_t p, std::size_t q) { return a_[p * n_ + q]; }
  int at(std::size_t p, std::size_t q) const { return a_[p * n_ + q]; }
  std::vector<std::vector<int>> rows() const;

  struct Edge {
    std::size_t p;
    std::size_t q;
    std::size_t plane;  // 0-based
  };
  /// Pairs p < q with a shared hyperplane, row-major order.
  std::vector<Edge> edges() const;

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<int> a_;
};

struct Halfspace {
  std::size_t plane;  // 0-based hyperplane index
  int sigma;          // side: 0 keeps h^T x <= 1, 1 keeps h^T x >= 1

  bool operator==(const Halfspace&) const = default;
};

/// {x in D | (-1)^sigma_i h_i^T x <= (-1)^sigma_i} over boundary hyperplanes only.
struct Region {
  std::size_t id = 0;
  std::vector<Halfspace> halfspaces;

  bool operator==(const Region&) const = default;
};

struct RegionSet {
  std::vector<Region> regions;
  AdjacencyMatrix adjacency;
  std::size_t count = 0;
};

struct ChamberOptions {
  std::size_t cut_limit = kDefaultCutLimit;
  double eps = kStrictMargin;
  /// Optional working-frame points used as feasibility certificates before an
  /// LP is solved.
  std::span<const Vec> witnesses{};
};

/// Nonempty chambers of the arrangement inside the domain, in ascending l.
/// Enumerated depth first over sigma_1..sigma_nc with infeasible prefixes
/// pruned.
FeasibilityMatrix chambers(const CutArrangement& arrangement, const Domain& domain, const ChamberOptions& options = {});

/// Reference sweep over every l in [0, 2^nc), one LP each.
FeasibilityMatrix chambers_exhaustive(const CutArrangement& arrangement, const Domain& domain,
                                      const ChamberOptions& options = {});

AdjacencyMatrix adjacency(const FeasibilityMatrix& sigma);

RegionSet regions(const CutArrangement& arrangement, const FeasibilityMatrix& sigma);

std::uint64_t sigma_code(const CutArrangement& arrangement, const Vec& x);

/// Column whose sigma vector matches x. Boundary ambiguity falls back to the
/// column at minimal Hamming distance, lowest index first.
std::size_t locate_chamber(const CutArrangement& arrangement, const FeasibilityMatrix& sigma, const Vec& x);

/// Constraint list describing chamber p (all cuts, strict sides relaxed).
std::vector<CutConstraint> chamber_constraints(const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                                               std::size_t p);

/// Closure of the facet shared by chambers p and q across `plane`: the other
/// cuts keep chamber p's sides (non-strict) and the shared cut becomes an
/// equality.
std::vector<CutConstraint> facet_constraints(const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                                             std::size_t p, std::size_t plane);

/// Zaslavsky bound sum_{k=0}^{min(nc,d)} C(nc, k).
std::uint64_t zaslavsky_bound(std::size_t cuts, std::size_t dim);

}  // namespace pwacut
