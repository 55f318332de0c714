#include "pwacut/geometry.hpp"

#include "pwacut/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pwacut {

namespace {
constexpr double kMaxCondition = 1e12;
}

Domain::Domain(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw DomainError("domain must have at least one dimension");
  if (lower_.size() != upper_.size()) throw DomainError("domain bounds have mismatched dimensions");
  for (Eigen::Index j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]))
      throw DomainError("domain bound on axis " + std::to_string(j + 1) + " is not finite");
    if (!(upper_[j] > lower_[j]))
      throw DomainError("domain axis " + std::to_string(j + 1) + " is empty (upper <= lower)");
  }
  shift_ = 0.5 * (lower_ + upper_);
  half_ = 0.5 * (upper_ - lower_);
}

bool Domain::contains_working(const Vec& x, double tol) const {
  if (x.size() != half_.size()) return false;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double slack = tol * std::max(1.0, half_[j]);
    if (std::abs(x[j]) > half_[j] + slack) return false;
  }
  return true;
}

AngleGenome::AngleGenome(std::size_t cuts, std::size_t dim)
    : cuts_(cuts), dim_(dim), angles_(cuts * dim * angles_per_point(dim), 0.0) {}

AngleGenome::AngleGenome(std::size_t cuts, std::size_t dim, std::vector<double> angles)
    : cuts_(cuts), dim_(dim), angles_(std::move(angles)) {
  if (angles_.size() != cuts * dim * angles_per_point(dim))
    throw Error("angle genome has " + std::to_string(angles_.size()) + " genes, expected " +
                std::to_string(cuts * dim * angles_per_point(dim)));
}

double AngleGenome::upper_bound(std::size_t dim, std::size_t angle) {
  return angle + 1 == angles_per_point(dim) ? 2.0 * std::numbers::pi : std::numbers::pi;
}

double& AngleGenome::at(std::size_t cut, std::size_t point, std::size_t angle) {
  const std::size_t app = angles_per_point(dim_);
  return angles_[(cut * dim_ + point) * app + angle];
}

double AngleGenome::at(std::size_t cut, std::size_t point, std::size_t angle) const {
  const std::size_t app = angles_per_point(dim_);
  return angles_[(cut * dim_ + point) * app + angle];
}

std::vector<double> AngleGenome::point_angles(std::size_t cut, std::size_t point) const {
  const std::size_t app = angles_per_point(dim_);
  const auto first = angles_.begin() + static_cast<std::ptrdiff_t>((cut * dim_ + point) * app);
  return {first, first + static_cast<std::ptrdiff_t>(app)};
}

bool AngleGenome::within_bounds() const {
  for (std::size_t g = 0; g < angles_.size(); ++g) {
    if (!(angles_[g] >= 0.0 && angles_[g] <= gene_upper_bound(g))) return false;
  }
  return true;
}

std::size_t CutArrangement::degenerate_count() const {
  std::size_t n = 0;
  for (bool b : degenerate) n += b ? 1 : 0;
  return n;
}

CutArrangement CutArrangement::from_vectors(const std::vector<Vec>& hs) {
  CutArrangement out;
  for (const auto& h : hs) {
    out.planes.push_back({h});
    out.degenerate.push_back(false);
  }
  return out;
}

Hypersphere enclosing_hypersphere(const Domain& domain) { return {domain.half_width().norm()}; }

Vec spherical_to_cartesian(const std::vector<double>& angles, double radius, std::size_t dim) {
  Vec x(static_cast<Eigen::Index>(dim));
  if (dim == 1) {
    x[0] = radius * std::cos(angles.at(0));
    return x;
  }
  if (angles.size() != dim - 1) throw Error("expected " + std::to_string(dim - 1) + " angles");
  double sin_prod = 1.0;
  for (std::size_t j = 0; j + 1 < dim; ++j) {
    x[static_cast<Eigen::Index>(j)] = radius * std::cos(angles[j]) * sin_prod;
    sin_prod *= std::sin(angles[j]);
  }
  x[static_cast<Eigen::Index>(dim - 1)] = radius * sin_prod;
  return x;
}

std::optional<Hyperplane> try_hyperplane_from_points(const Mat& points) {
  if (points.rows() != points.cols() || points.rows() == 0) return std::nullopt;
  if (!points.allFinite()) return std::nullopt;
  const Eigen::JacobiSVD<Mat> svd(points);
  const auto& s = svd.singularValues();
  const double smax = s[0];
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0) || smax / smin > kMaxCondition) return std::nullopt;
  const Vec ones = Vec::Ones(points.rows());
  Vec h = points.fullPivLu().solve(ones);
  if (!h.allFinite() || h.isZero(0.0)) return std::nullopt;
  return Hyperplane{std::move(h)};
}

Hyperplane hyperplane_from_points(const Mat& points) {
  if (points.rows() != points.cols() || points.rows() == 0)
    throw Error("hyperplane needs d points in R^d");
  if (auto plane = try_hyperplane_from_points(points)) return *std::move(plane);
  const Eigen::JacobiSVD<Mat> svd(points);
  const auto& s = svd.singularValues();
  throw SingularPoints(s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : INFINITY);
}

CutArrangement decode_genome(const AngleGenome& genome, const Hypersphere& sphere) {
  const std::size_t d = genome.dim();
  CutArrangement out;
  out.planes.reserve(genome.cuts());
  out.degenerate.reserve(genome.cuts());
  Mat pts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < genome.cuts(); ++i) {
    for (std::size_t k = 0; k < d; ++k)
      pts.row(static_cast<Eigen::Index>(k)) = spherical_to_cartesian(genome.point_angles(i, k), sphere.radius, d).transpose();
    if (auto plane = try_hyperplane_from_points(pts)) {
      out.planes.push_back(*std::move(plane));
      out.degenerate.push_back(false);
    } else {
      out.planes.push_back({Vec::Zero(static_cast<Eigen::Index>(d))});
      out.degenerate.push_back(true);
    }
  }
  return out;
}

}  // namespace pwacut
