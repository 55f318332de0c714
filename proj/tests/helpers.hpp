#pragma once

#include "pwacut/geometry.hpp"
#include "pwacut/partition.hpp"
#include "pwacut/random.hpp"

#include <initializer_list>
#include <vector>

namespace testing {

using pwacut::Mat;
using pwacut::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline pwacut::Domain cube(std::size_t d, double lo, double hi) {
  return pwacut::Domain(Vec::Constant(static_cast<Eigen::Index>(d), lo), Vec::Constant(static_cast<Eigen::Index>(d), hi));
}

// Three cuts of the [-2, 2]^3 worked example.
inline pwacut::CutArrangement example2() {
  return pwacut::CutArrangement::from_vectors({vec({-1, 2, 5}), vec({0.1, -0.5, -0.2}), vec({-1, 1, 0})});
}

inline std::vector<std::vector<int>> example2_sigma() {
  return {{0, 0, 0, 1, 1}, {0, 0, 1, 0, 0}, {0, 1, 0, 0, 1}};
}

inline std::vector<std::vector<int>> example2_adjacency() {
  return {{0, 3, 2, 1, 0}, {3, 0, 0, 0, 1}, {2, 0, 0, 0, 0}, {1, 0, 0, 0, 3}, {0, 1, 0, 3, 0}};
}

// Random cut through the box: a normal direction and an offset that puts the
// plane at a random point of the box interior.
inline pwacut::Vec random_cut(const pwacut::Domain& D, pwacut::Rng& rng) {
  const auto d = static_cast<Eigen::Index>(D.dim());
  for (;;) {
    Vec n(d), p(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      n[j] = rng.normal();
      p[j] = rng.uniform(-0.9, 0.9) * D.half_width()[j];
    }
    const double off = n.dot(p);
    if (std::abs(off) > 1e-3) return n / off;
  }
}

inline pwacut::Vec random_point(const pwacut::Domain& D, pwacut::Rng& rng) {
  Vec x(static_cast<Eigen::Index>(D.dim()));
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.uniform(-1.0, 1.0) * D.half_width()[j];
  return x;
}

}  // namespace testing
