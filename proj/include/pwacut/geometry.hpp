#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace pwacut {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Axis-aligned box. Bounds are kept in the problem (original) frame; the
/// working frame is the box translated so that its center sits at the origin.
class Domain {
 public:
  Domain(Vec lower, Vec upper);

  std::size_t dim() const { return static_cast<std::size_t>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  const Vec& shift() const { return shift_; }
  /// Half side lengths; the working-frame box is [-half, half].
  const Vec& half_width() const { return half_; }

  Vec to_working(const Vec& x) const { return x - shift_; }
  Vec to_original(const Vec& x) const { return x + shift_; }

  /// Working-frame containment with slack `tol * max(1, half_j)` per axis.
  bool contains_working(const Vec& x, double tol = 1e-9) const;

  bool operator==(const Domain& o) const {
    return lower_ == o.lower_ && upper_ == o.upper_;
  }

 private:
  Vec lower_;
  Vec upper_;
  Vec shift_;
  Vec half_;
};

struct Hypersphere {
  double radius;
};

/// {x | h^T x = 1} in the working frame.
struct Hyperplane {
  Vec h;

  double value(const Vec& x) const { return h.dot(x); }
};

/// Spherical angles of the d defining points of each hyperplane. Layout is
/// [hyperplane][point][angle]; the last angle of each point spans [0, 2pi],
/// the others [0, pi]. In one dimension a point carries a single angle and
/// sits at rho*cos(phi).
class AngleGenome {
 public:
  AngleGenome() = default;
  AngleGenome(std::size_t cuts, std::size_t dim);
  AngleGenome(std::size_t cuts, std::size_t dim, std::vector<double> angles);

  static std::size_t angles_per_point(std::size_t dim) { return dim <= 1 ? 1 : dim - 1; }
  static double upper_bound(std::size_t dim, std::size_t angle);

  std::size_t cuts() const { return cuts_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return angles_.size(); }
  std::size_t genes_per_cut() const { return dim_ * angles_per_point(dim_); }

  double& at(std::size_t cut, std::size_t point, std::size_t angle);
  double at(std::size_t cut, std::size_t point, std::size_t angle) const;
  /// Angles of one point, length angles_per_point(dim).
  std::vector<double> point_angles(std::size_t cut, std::size_t point) const;

  std::vector<double>& raw() { return angles_; }
  const std::vector<double>& raw() const { return angles_; }

  /// Bound of the flat gene index `g`.
  double gene_upper_bound(std::size_t g) const {
    return upper_bound(dim_, g % angles_per_point(dim_));
  }
  bool within_bounds() const;

  bool operator==(const AngleGenome& o) const = default;

 private:
  std::size_t cuts_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> angles_;
};

struct CutArrangement {
  std::vector<Hyperplane> planes;
  /// degenerate[i] is set when hyperplane i could not be built; planes[i] is
  /// then a zero placeholder.
  std::vector<bool> degenerate;

  std::size_t size() const { return planes.size(); }
  std::size_t dim() const { return planes.empty() ? 0 : static_cast<std::size_t>(planes.front().h.size()); }
  std::size_t degenerate_count() const;

  static CutArrangement from_vectors(const std::vector<Vec>& hs);
};

Hypersphere enclosing_hypersphere(const Domain& domain);

Vec spherical_to_cartesian(const std::vector<double>& angles, double radius, std::size_t dim);

/// Solves X h = 1 for the row-stacked points X. Throws SingularPoints when
/// cond(X) > 1e12.
Hyperplane hyperplane_from_points(const Mat& points);
std::optional<Hyperplane> try_hyperplane_from_points(const Mat& points);

CutArrangement decode_genome(const AngleGenome& genome, const Hypersphere& sphere);

/// 0 if h^T x < 1, else 1.
inline int sigma_of_point(const Hyperplane& plane, const Vec& x) { return plane.value(x) < 1.0 ? 0 : 1; }

}  // namespace pwacut
