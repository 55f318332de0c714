#include "pwacut/lp.hpp"

#include "pwacut/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace pwacut::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Mat::Zero(rows + 1, cols + 1)), basis_(static_cast<std::size_t>(rows), -1) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
  double& rhs(Eigen::Index r) { return t_(r, cols()); }
  double& cost(Eigen::Index c) { return t_(rows(), c); }
  double& objective() { return t_(rows(), cols()); }
  Eigen::Index& basic(Eigen::Index r) { return basis_[static_cast<std::size_t>(r)]; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double factor = t_(i, c);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  /// Runs primal simplex on the current cost row; columns with allowed[c] ==
  /// false never enter.
  void optimize(const std::vector<bool>& allowed) {
    const Eigen::Index max_iter = 50 * (rows() + cols()) + 1000;
    for (Eigen::Index iter = 0; iter < max_iter; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < cols(); ++c) {
        if (allowed[static_cast<std::size_t>(c)] && cost(c) < -kCostTol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && leave >= 0 && basic(r) < basic(leave))) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) throw NumericalFailure("LP is unbounded");
      pivot(leave, enter);
    }
    throw NumericalFailure("simplex did not converge");
  }

 private:
  Mat t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Solution solve(const Problem& p, double feas_tol) {
  const Eigen::Index n = p.upper.size();
  const Eigen::Index m_ineq = p.A.rows();
  const Eigen::Index m_eq = p.E.rows();
  const Eigen::Index m = m_ineq + m_eq + n;

  // Columns: structural y, slacks for inequalities and bound rows, then one
  // artificial per row that needs it.
  std::vector<bool> needs_art(static_cast<std::size_t>(m), false);
  for (Eigen::Index r = 0; r < m_ineq; ++r) needs_art[static_cast<std::size_t>(r)] = p.b[r] < 0.0;
  for (Eigen::Index r = 0; r < m_eq; ++r) needs_art[static_cast<std::size_t>(m_ineq + r)] = true;
  Eigen::Index n_art = 0;
  for (bool b : needs_art) n_art += b ? 1 : 0;

  const Eigen::Index slack0 = n;
  const Eigen::Index n_slack = m_ineq + n;
  const Eigen::Index art0 = slack0 + n_slack;
  const Eigen::Index ncols = art0 + n_art;
  Tableau tab(m, ncols);

  Eigen::Index art = art0;
  for (Eigen::Index r = 0; r < m_ineq; ++r) {
    const double sign = p.b[r] < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) tab.at(r, j) = sign * p.A(r, j);
    tab.at(r, slack0 + r) = sign;
    tab.rhs(r) = sign * p.b[r];
    if (sign < 0.0) {
      tab.at(r, art) = 1.0;
      tab.basic(r) = art++;
    } else {
      tab.basic(r) = slack0 + r;
    }
  }
  for (Eigen::Index r = 0; r < m_eq; ++r) {
    const Eigen::Index row = m_ineq + r;
    const double sign = p.f[r] < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) tab.at(row, j) = sign * p.E(r, j);
    tab.rhs(row) = sign * p.f[r];
    tab.at(row, art) = 1.0;
    tab.basic(row) = art++;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index row = m_ineq + m_eq + j;
    tab.at(row, j) = 1.0;
    tab.at(row, slack0 + m_ineq + j) = 1.0;
    tab.rhs(row) = p.upper[j];
    tab.basic(row) = slack0 + m_ineq + j;
  }

  // Phase 1: minimize the sum of artificials, expressed in nonbasic terms.
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basic(r) < art0) continue;
    for (Eigen::Index c = 0; c <= ncols; ++c) {
      if (c >= art0 && c < ncols) continue;
      (c == ncols ? tab.objective() : tab.cost(c)) -= (c == ncols ? tab.rhs(r) : tab.at(r, c));
    }
  }
  std::vector<bool> allowed(static_cast<std::size_t>(ncols), true);
  tab.optimize(allowed);
  if (-tab.objective() > feas_tol) return {};

  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basic(r) < art0) continue;
    for (Eigen::Index c = 0; c < art0; ++c) {
      if (std::abs(tab.at(r, c)) > 1e-9) {
        tab.pivot(r, c);
        break;
      }
    }
  }
  for (Eigen::Index c = art0; c < ncols; ++c) allowed[static_cast<std::size_t>(c)] = false;

  Solution sol;
  sol.status = Status::Optimal;
  if (p.cost.size() == n) {
    for (Eigen::Index c = 0; c <= ncols; ++c) {
      if (c == ncols)
        tab.objective() = 0.0;
      else
        tab.cost(c) = c < n ? p.cost[c] : 0.0;
    }
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index b = tab.basic(r);
      if (b >= n) continue;
      const double cb = p.cost[b];
      if (cb == 0.0) continue;
      for (Eigen::Index c = 0; c < ncols; ++c) tab.cost(c) -= cb * tab.at(r, c);
      tab.objective() -= cb * tab.rhs(r);
    }
    tab.optimize(allowed);
  }

  sol.y = Vec::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index b = tab.basic(r);
    if (b < n) sol.y[b] = tab.rhs(r);
  }
  sol.objective = p.cost.size() == n ? p.cost.dot(sol.y) : 0.0;
  return sol;
}

}  // namespace pwacut::lp
