#include "pwacut/fitting.hpp"

#include "pwacut/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pwacut {

namespace {

using Index = Eigen::Index;

struct NormalEquations {
  std::vector<Mat> gram;  // (d+1) x (d+1) per region
  std::vector<Mat> rhs;   // (d+1) x n per region
  std::vector<std::size_t> counts;
};

NormalEquations accumulate(const FitData& data, std::size_t regions, std::span<const std::size_t> assignment) {
  const Mat& phi = data.features();
  const Mat& F = data.samples().values;
  const Index m = phi.cols();
  const Index n = F.cols();
  NormalEquations ne;
  ne.gram.assign(regions, Mat::Zero(m, m));
  ne.rhs.assign(regions, Mat::Zero(m, n));
  ne.counts.assign(regions, 0);
  if (assignment.size() != data.samples().size()) throw Error("assignment length does not match the sample count");
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    const std::size_t p = assignment[k];
    if (p >= regions) throw Error("sample assigned to a nonexistent region");
    const auto row = phi.row(static_cast<Index>(k));
    const double w = data.weights()[static_cast<Index>(k)];
    Mat& G = ne.gram[p];
    for (Index a = 0; a < m; ++a) {
      const double wa = w * row[a];
      for (Index b = 0; b <= a; ++b) G(a, b) += wa * row[b];
    }
    ne.rhs[p].noalias() += (w * row.transpose()) * F.row(static_cast<Index>(k));
    ++ne.counts[p];
  }
  for (auto& G : ne.gram) {
    G.diagonal().array() += kRidge;
    G.template triangularView<Eigen::StrictlyUpper>() = G.transpose();
  }
  return ne;
}

/// theta is (d+1) x n in normalized coordinates: rows 0..d-1 hold J^T scaled
/// by the half widths, row d holds K.
AffineMode to_mode(const Mat& theta, const Vec& half) {
  const Index d = half.size();
  AffineMode mode;
  mode.J = theta.topRows(d).transpose();
  for (Index j = 0; j < d; ++j) mode.J.col(j) /= half[j];
  mode.K = theta.row(d).transpose();
  return mode;
}

FitResult finish(const FitData& data, std::vector<AffineMode> modes, const NormalEquations& ne,
                 std::span<const std::size_t> assignment) {
  FitResult out;
  out.modes = std::move(modes);
  const auto c = cost(data.samples(), out.modes, assignment);
  out.gamma = c.gamma;
  out.max_rel_err = c.max_rel_err;
  out.region_samples = ne.counts;
  const std::size_t need = data.samples().dim() + 1;
  out.undersampled.resize(ne.counts.size());
  for (std::size_t p = 0; p < ne.counts.size(); ++p) out.undersampled[p] = ne.counts[p] < need;
  return out;
}

/// Solves (G + ridge I) theta = b and then refines twice with
/// theta <- (G + ridge I)^-1 (b + ridge theta). Well-determined directions
/// lose the ridge bias; directions with curvature far below the ridge stay
/// damped, which keeps sliver regions finite.
template <typename Solver>
Mat ridge_solve(const Solver& solver, const Mat& b) {
  constexpr int kRefinements = 2;
  Mat theta = solver.solve(b);
  for (int it = 0; it < kRefinements; ++it) theta = solver.solve(b + kRidge * theta);
  return theta;
}

}  // namespace

std::size_t FitResult::undersampled_count() const {
  return static_cast<std::size_t>(std::count(undersampled.begin(), undersampled.end(), true));
}

FitData::FitData(const SampleSet& samples, const Domain& domain) : samples_(&samples), domain_(&domain) {
  const Index N = samples.points.rows();
  const Index d = samples.points.cols();
  if (static_cast<std::size_t>(d) != domain.dim()) throw Error("sample dimension does not match the domain");
  if (samples.values.rows() != N) throw Error("samples have no function values");
  features_.resize(N, d + 1);
  const Vec inv_half = domain.half_width().cwiseInverse();
  features_.leftCols(d) = samples.points * inv_half.asDiagonal();
  features_.col(d).setOnes();
  weights_ = (samples.values.rowwise().squaredNorm().array() + 1.0).inverse().matrix();
}

std::vector<std::size_t> assign_samples(const CutArrangement& arrangement, const FeasibilityMatrix& sigma,
                                        const SampleSet& samples) {
  std::vector<std::size_t> out(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) out[k] = locate_chamber(arrangement, sigma, samples.point(k));
  return out;
}

CostValue cost(const SampleSet& samples, std::span<const AffineMode> modes, std::span<const std::size_t> assignment) {
  CostValue out;
  const std::size_t N = samples.size();
  if (assignment.size() != N) throw Error("assignment length does not match the sample count");
  double sum = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const Vec x = samples.point(k);
    const Vec F = samples.values.row(static_cast<Index>(k)).transpose();
    const Vec f = modes[assignment[k]](x);
    const double rel = (F - f).squaredNorm() / (F.squaredNorm() + 1.0);
    sum += rel;
    out.max_rel_err = std::max(out.max_rel_err, std::sqrt(rel));
  }
  out.gamma = N ? sum / static_cast<double>(N) : 0.0;
  return out;
}

FitResult fit_unconstrained(const FitData& data, std::size_t region_count, std::span<const std::size_t> assignment) {
  const auto ne = accumulate(data, region_count, assignment);
  std::vector<AffineMode> modes;
  modes.reserve(region_count);
  for (std::size_t p = 0; p < region_count; ++p)
    modes.push_back(to_mode(ridge_solve(ne.gram[p].ldlt(), ne.rhs[p]), data.domain().half_width()));
  return finish(data, std::move(modes), ne, assignment);
}

FitResult fit_continuous(const FitData& data, const AdjacencyMatrix& adjacency, const CutArrangement& arrangement,
                         std::span<const std::size_t> assignment) {
  const std::size_t P = adjacency.size();
  const auto edges = adjacency.edges();
  if (edges.empty()) return fit_unconstrained(data, P, assignment);

  const auto ne = accumulate(data, P, assignment);
  const Vec& half = data.domain().half_width();
  const Index d = half.size();
  const Index m = d + 1;
  const Index nvar = static_cast<Index>(P) * m;
  const Index n = data.samples().values.cols();

  // (Jz_p - Jz_q) + (K_p - K_q) hz^T = 0, d rows per shared facet; c is
  // eliminated through c = K_q - K_p.
  Mat C = Mat::Zero(static_cast<Index>(edges.size()) * d, nvar);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    const Vec hz = half.cwiseProduct(arrangement.planes[edge.plane].h);
    const Index p0 = static_cast<Index>(edge.p) * m;
    const Index q0 = static_cast<Index>(edge.q) * m;
    for (Index j = 0; j < d; ++j) {
      const Index r = static_cast<Index>(e) * d + j;
      C(r, p0 + j) = 1.0;
      C(r, q0 + j) = -1.0;
      C(r, p0 + d) = hz[j];
      C(r, q0 + d) = -hz[j];
    }
  }

  // Null space of C from a rank-revealing QR of C^T.
  Eigen::ColPivHouseholderQR<Mat> qr(C.transpose());
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  const Mat Q = qr.householderQ() * Mat::Identity(nvar, nvar);
  const Mat N = Q.rightCols(nvar - rank);

  Mat HN(nvar, N.cols());
  Mat b(nvar, n);
  for (std::size_t p = 0; p < P; ++p) {
    const Index o = static_cast<Index>(p) * m;
    HN.middleRows(o, m).noalias() = ne.gram[p] * N.middleRows(o, m);
    b.middleRows(o, m) = ne.rhs[p];
  }
  const Mat reduced = N.transpose() * HN;
  const Mat y = ridge_solve(reduced.ldlt(), N.transpose() * b);
  const Mat theta = N * y;

  std::vector<AffineMode> modes;
  modes.reserve(P);
  for (std::size_t p = 0; p < P; ++p) modes.push_back(to_mode(theta.middleRows(static_cast<Index>(p) * m, m), half));
  FitResult out = finish(data, std::move(modes), ne, assignment);
  for (const auto& edge : edges)
    out.couplings.push_back({edge.p, edge.q, edge.plane, out.modes[edge.q].K - out.modes[edge.p].K});
  return out;
}

ContinuityResidual continuity_residual(const AffineMode& p, const AffineMode& q, const Vec& h) {
  const Mat dJ = p.J - q.J;
  const Vec c = dJ * h / h.squaredNorm();
  ContinuityResidual r;
  r.jacobian = (dJ - c * h.transpose()).norm();
  r.offset = (p.K - q.K + c).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace pwacut
