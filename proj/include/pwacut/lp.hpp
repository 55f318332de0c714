#pragma once

#include "pwacut/geometry.hpp"

namespace pwacut::lp {

/// minimize cost^T y  s.t.  A y <= b,  E y = f,  0 <= y <= upper.
/// An empty cost vector asks for feasibility only.
struct Problem {
  Mat A;
  Vec b;
  Mat E;
  Vec f;
  Vec upper;
  Vec cost;
};

enum class Status { Optimal, Infeasible };

struct Solution {
  Status status = Status::Infeasible;
  Vec y;
  double objective = 0.0;
};

/// Dense two-phase simplex with Bland's rule. Sum of phase-1 artificials must
/// fall below `feas_tol` for the problem to count as feasible. Throws
/// NumericalFailure when the iteration cap is hit.
Solution solve(const Problem& problem, double feas_tol = 1e-9);

}  // namespace pwacut::lp
