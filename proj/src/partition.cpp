#include "pwacut/partition.hpp"

#include "pwacut/errors.hpp"
#include "pwacut/lp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace pwacut {

namespace {

struct Row {
  Vec a;  // in z = x / half_width coordinates
  double rhs;
  bool equality;
};

std::vector<Row> normalized_rows(std::span<const CutConstraint> constraints, const Domain& domain, double eps) {
  const double rho = enclosing_hypersphere(domain).radius;
  std::vector<Row> rows;
  rows.reserve(constraints.size());
  for (const auto& c : constraints) {
    Vec a = domain.half_width().cwiseProduct(c.h);
    switch (c.sense) {
      case Sense::StrictLess:
        rows.push_back({std::move(a), 1.0 - eps * std::max(1.0, c.h.norm() * rho), false});
        break;
      case Sense::LessEq:
        rows.push_back({std::move(a), 1.0, false});
        break;
      case Sense::GreaterEq:
        rows.push_back({-a, -1.0, false});
        break;
      case Sense::Equal:
        rows.push_back({std::move(a), 1.0, true});
        break;
    }
  }
  return rows;
}

/// Shifts rows to y = z + 1 >= 0 and scales them; returns false when a row
/// with vanishing coefficients is violated outright.
bool build_problem(const std::vector<Row>& rows, std::size_t dim, bool with_depth, lp::Problem& prob) {
  const auto n = static_cast<Eigen::Index>(dim);
  const Eigen::Index nv = with_depth ? n + 1 : n;
  std::vector<std::pair<Vec, double>> ineq;
  std::vector<std::pair<Vec, double>> eq;
  for (const auto& r : rows) {
    const double scale = with_depth ? r.a.norm() : r.a.cwiseAbs().maxCoeff();
    const double rhs = r.rhs + r.a.sum();
    if (!(scale > 0.0)) {
      if (r.equality ? r.rhs != 0.0 : r.rhs < 0.0) return false;
      continue;
    }
    Vec row = Vec::Zero(nv);
    row.head(n) = r.a / scale;
    if (r.equality) {
      eq.emplace_back(std::move(row), rhs / scale);
    } else {
      if (with_depth) row[n] = 1.0;
      ineq.emplace_back(std::move(row), rhs / scale);
    }
  }
  if (with_depth) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Vec lo = Vec::Zero(nv);
      lo[j] = -1.0;
      lo[n] = 1.0;
      ineq.emplace_back(std::move(lo), 0.0);
      Vec hi = Vec::Zero(nv);
      hi[j] = 1.0;
      hi[n] = 1.0;
      ineq.emplace_back(std::move(hi), 2.0);
    }
  }
  prob.A.resize(static_cast<Eigen::Index>(ineq.size()), nv);
  prob.b.resize(static_cast<Eigen::Index>(ineq.size()));
  for (std::size_t i = 0; i < ineq.size(); ++i) {
    prob.A.row(static_cast<Eigen::Index>(i)) = ineq[i].first.transpose();
    prob.b[static_cast<Eigen::Index>(i)] = ineq[i].second;
  }
  prob.E.resize(static_cast<Eigen::Index>(eq.size()), nv);
  prob.f.resize(static_cast<Eigen::Index>(eq.size()));
  for (std::size_t i = 0; i < eq.size(); ++i) {
    prob.E.row(static_cast<Eigen::Index>(i)) = eq[i].first.transpose();
    prob.f[static_cast<Eigen::Index>(i)] = eq[i].second;
  }
  prob.upper = Vec::Constant(nv, 2.0);
  if (with_depth) {
    prob.upper[n] = 1.0;
    prob.cost = Vec::Zero(nv);
    prob.cost[n] = -1.0;
  }
  return true;
}

CutConstraint side_constraint(const Hyperplane& plane, int sigma) {
  return {plane.h, sigma == 0 ? Sense::StrictLess : Sense::GreaterEq};
}

bool feasible_or_absent(std::span<const CutConstraint> cons, const Domain& domain, double eps) {
  try {
    return lp_feasible(cons, domain, eps);
  } catch (const NumericalFailure& e) {
    std::cerr << "warning: chamber LP failed (" << e.what() << "); chamber treated as absent\n";
    return false;
  }
}

void require_usable(const CutArrangement& arrangement, const ChamberOptions& options) {
  if (arrangement.size() > options.cut_limit || arrangement.size() > 63)
    throw TooManyCuts(arrangement.size(), std::min<std::size_t>(options.cut_limit, 63));
  if (arrangement.degenerate_count() > 0) throw Error("arrangement contains degenerate hyperplanes");
}

/// Per-witness side states: 0 / 1 when the margin-relaxed constraint holds,
/// 2 when the point sits inside the margin band.
std::vector<std::uint8_t> witness_states(const CutArrangement& arrangement, const Domain& domain,
                                         std::span<const Vec> witnesses, double eps) {
  const double rho = enclosing_hypersphere(domain).radius;
  const std::size_t nc = arrangement.size();
  std::vector<double> lower_cut(nc);
  for (std::size_t i = 0; i < nc; ++i)
    lower_cut[i] = 1.0 - eps * std::max(1.0, arrangement.planes[i].h.norm() * rho);
  std::vector<std::uint8_t> states(witnesses.size() * nc);
  for (std::size_t w = 0; w < witnesses.size(); ++w) {
    const bool inside = domain.contains_working(witnesses[w], 0.0);
    for (std::size_t i = 0; i < nc; ++i) {
      const double v = arrangement.planes[i].value(witnesses[w]);
      std::uint8_t s = 2;
      if (inside) s = v >= 1.0 ? 1 : (v <= lower_cut[i] ? 0 : 2);
      states[w * nc + i] = s;
    }
  }
  return states;
}

class ChamberSearch {
 public:
  ChamberSearch(const CutArrangement& arrangement, const Domain& domain, const ChamberOptions& options)
      : arr_(arrangement), domain_(domain), options_(options), nc_(arrangement.size()) {
    states_ = witness_states(arrangement, domain, options.witnesses, options.eps);
  }

  std::vector<std::uint64_t> run() {
    std::vector<std::size_t> all(options_.witnesses.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    prefix_.clear();
    descend(0, 0, all);
    return std::move(found_);
  }

 private:
  void descend(std::size_t depth, std::uint64_t code, const std::vector<std::size_t>& witnesses) {
    if (depth == nc_) {
      found_.push_back(code);
      return;
    }
    for (int bit = 0; bit <= 1; ++bit) {
      std::vector<std::size_t> kept;
      for (std::size_t w : witnesses) {
        if (states_[w * nc_ + depth] == bit) kept.push_back(w);
      }
      prefix_.push_back(side_constraint(arr_.planes[depth], bit));
      const bool feasible = !kept.empty() || feasible_or_absent(prefix_, domain_, options_.eps);
      if (feasible) descend(depth + 1, (code << 1) | static_cast<std::uint64_t>(bit), kept);
      prefix_.pop_back();
    }
  }

  const CutArrangement& arr_;
  const Domain& domain_;
  const ChamberOptions& options_;
  std::size_t nc_;
  std::vector<std::uint8_t> states_;
  std::vector<CutConstraint> prefix_;
  std::vector<std::uint64_t> found_;
};

}  // namespace

bool lp_feasible(std::span<const CutConstraint> constraints, const Domain& domain, double eps) {
  if (!(eps > 0.0)) throw Error("strict margin must be positive");
  const auto rows = normalized_rows(constraints, domain, eps);
  lp::Problem prob;
  if (!build_problem(rows, domain.dim(), false, prob)) return false;
  if (prob.A.rows() == 0 && prob.E.rows() == 0) return true;
  return lp::solve(prob).status == lp::Status::Optimal;
}

std::optional<Vec> interior_point(std::span<const CutConstraint> constraints, const Domain& domain, double* depth) {
  const auto rows = normalized_rows(constraints, domain, kStrictMargin);
  lp::Problem prob;
  if (!build_problem(rows, domain.dim(), true, prob)) return std::nullopt;
  const auto sol = lp::solve(prob);
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(domain.dim());
  if (depth) *depth = sol.y[n];
  const Vec z = sol.y.head(n).array() - 1.0;
  return Vec(domain.half_width().cwiseProduct(z));
}

FeasibilityMatrix::FeasibilityMatrix(std::size_t cuts, std::vector<std::uint64_t> codes)
    : cuts_(cuts), codes_(std::move(codes)), sorted_(std::is_sorted(codes_.begin(), codes_.end())) {}

FeasibilityMatrix FeasibilityMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t nc = rows.size();
  const std::size_t cols = nc == 0 ? 1 : rows.front().size();
  std::vector<std::uint64_t> codes(cols, 0);
  for (std::size_t i = 0; i < nc; ++i) {
    if (rows[i].size() != cols) throw Error("ragged feasibility matrix");
    for (std::size_t p = 0; p < cols; ++p) codes[p] = (codes[p] << 1) | static_cast<std::uint64_t>(rows[i][p] != 0);
  }
  return FeasibilityMatrix(nc, std::move(codes));
}

std::vector<int> FeasibilityMatrix::column(std::size_t p) const {
  std::vector<int> col(cuts_);
  for (std::size_t i = 0; i < cuts_; ++i) col[i] = at(i, p);
  return col;
}

std::vector<std::vector<int>> FeasibilityMatrix::rows() const {
  std::vector<std::vector<int>> out(cuts_, std::vector<int>(codes_.size()));
  for (std::size_t i = 0; i < cuts_; ++i)
    for (std::size_t p = 0; p < codes_.size(); ++p) out[i][p] = at(i, p);
  return out;
}

std::optional<std::size_t> FeasibilityMatrix::find(std::uint64_t code) const {
  if (!sorted_) {
    const auto it = std::find(codes_.begin(), codes_.end(), code);
    if (it == codes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - codes_.begin());
  }
  const auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - codes_.begin());
}

AdjacencyMatrix AdjacencyMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  AdjacencyMatrix m(rows.size());
  for (std::size_t p = 0; p < rows.size(); ++p) {
    if (rows[p].size() != rows.size()) throw Error("adjacency matrix is not square");
    for (std::size_t q = 0; q < rows.size(); ++q) m.at(p, q) = rows[p][q];
  }
  return m;
}

std::vector<std::vector<int>> AdjacencyMatrix::rows() const {
  std::vector<std::vector<int>> out(n_, std::vector<int>(n_));
  for (std::size_t p = 0; p < n_; ++p)
    for (std::size_t q = 0; q < n_; ++q) out[p][q] = at(p, q);
  return out;
}

std::vector<AdjacencyMatrix::Edge> AdjacencyMatrix::edges() const {
  std::vector<Edge> out;
  for (std::size_t p = 0; p < n_; ++p)
    for (std::size_t q = p + 1; q < n_; ++q)
      if (at(p, q) > 0) out.push_back({p, q, static_cast<std::size_t>(at(p, q) - 1)});
  return out;
}

FeasibilityMatrix chambers(const CutArrangement& arrangement, const Domain& domain, const ChamberOptions& options) {
  require_usable(arrangement, options);
  ChamberSearch search(arrangement, domain, options);
  return FeasibilityMatrix(arrangement.size(), search.run());
}

FeasibilityMatrix chambers_exhaustive(const CutArrangement& arrangement, const Domain& domain,
                                      const ChamberOptions& options) {
  require_usable(arrangement, options);
  const std::size_t nc = arrangement.size();
  std::vector<std::uint64_t> codes;
  std::vector<CutConstraint> cons(nc);
  for (std::uint64_t l = 0; l < (std::uint64_t{1} << nc); ++l) {
    for (std::size_t i = 0; i < nc; ++i) {
      const int bit = static_cast<int>((l >> (nc - 1 - i)) & 1U);
      cons[i] = side_constraint(arrangement.planes[i], bit);
    }
    if (feasible_or_absent(cons, domain, options.eps)) codes.push_back(l);
  }
  return FeasibilityMatrix(nc, std::move(codes));
}

AdjacencyMatrix adjacency(const FeasibilityMatrix& sigma) {
  const std::size_t P = sigma.columns();
  AdjacencyMatrix a(P);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = p + 1; q < P; ++q) {
      const std::uint64_t diff = sigma.code(p) ^ sigma.code(q);
      if (std::popcount(diff) != 1) continue;
      const auto bit = static_cast<std::size_t>(std::countr_zero(diff));
      a.at(p, q) = static_cast<int>(sigma.cuts() - bit);
    }
  }
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t q = p + 1; q < P; ++q) a.at(q, p) += a.at(p, q);
  return a;
}

RegionSet regions(const CutArrangement& arrangement, const FeasibilityMatrix& sigma) {
  if (sigma.cuts() != arrangement.size()) throw Error("feasibility matrix does not match the arrangement");
  RegionSet out;
  out.count = sigma.columns();
  out.adjacency = adjacency(sigma);
  out.regions.resize(out.count);
  for (std::size_t p = 0; p < out.count; ++p) {
    Region& r = out.regions[p];
    r.id = p;
    std::vector<bool> boundary(arrangement.size(), false);
    for (std::size_t q = 0; q < out.count; ++q) {
      const int i = out.adjacency.at(p, q);
      if (i > 0) boundary[static_cast<std::size_t>(i - 1)] = true;
    }
    for (std::size_t i = 0; i < arrangement.size(); ++i)
      if (boundary[i]) r.halfspaces.push_back({i, sigma.at(i, p)});
  }
  return out;
}

std::uint64_t sigma_code(const CutArrangement& arrangement, const Vec& x) {
  std::uint64_t code = 0;
  for (const auto& plane : arrangement.planes) code = (code << 1) | static_cast<std::uint64_t>(sigma_of_point(plane, x));
  return code;
}

std::size_t locate_chamber(const CutArrangement& arrangement, const FeasibilityMatrix& sigma, const Vec& x) {
  const std::uint64_t code = sigma_code(arrangement, x);
  if (auto p = sigma.find(code)) return *p;
  std::size_t best = 0;
  int best_dist = std::numeric_limits<int>::max();
  for (std::size_t p = 0; p < sigma.columns(); ++p) {
    const int dist = std::popcount(code ^ sigma.code(p));
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  if (sigma.columns() == 0) throw Error("empty feasibility matrix");
  return best;
}

std::vector<CutConstraint> chamber_constraints(const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                                               std::size_t p) {
  std::vector<CutConstraint> out;
  for (std::size_t i = 0; i < arrangement.size(); ++i) out.push_back(side_constraint(arrangement.planes[i], sigma.at(i, p)));
  return out;
}

std::vector<CutConstraint> facet_constraints(const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                                             std::size_t p, std::size_t plane) {
  std::vector<CutConstraint> out;
  for (std::size_t i = 0; i < arrangement.size(); ++i) {
    const auto& h = arrangement.planes[i].h;
    if (i == plane)
      out.push_back({h, Sense::Equal});
    else
      out.push_back({h, sigma.at(i, p) == 0 ? Sense::LessEq : Sense::GreaterEq});
  }
  return out;
}

std::uint64_t zaslavsky_bound(std::size_t cuts, std::size_t dim) {
  std::uint64_t total = 0;
  std::uint64_t binom = 1;
  for (std::size_t k = 0; k <= std::min(cuts, dim); ++k) {
    total += binom;
    binom = binom * (cuts - k) / (k + 1);
  }
  return total;
}

}  // namespace pwacut
