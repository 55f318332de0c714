#pragma once

#include "helpers.hpp"

#include "pwacut/expr.hpp"
#include "pwacut/model.hpp"

#include <cmath>
#include <numbers>

namespace testing {

namespace ex = pwacut::expr;

// Random expression tree over numbers, variables, pi, negation, calls and
// binary operators.
inline ex::NodePtr random_node(pwacut::Rng& rng, int depth, ex::Dims dims) {
  auto n = std::make_shared<ex::Node>();
  const std::size_t pick = depth <= 0 ? rng.below(3) : rng.below(8);
  switch (pick) {
    case 0: {
      n->kind = ex::Kind::Number;
      const double raw = rng.uniform(0.0, 100.0);
      n->value = rng.below(2) ? std::floor(raw) : raw;
      break;
    }
    case 1: {
      n->kind = ex::Kind::Variable;
      n->index = rng.below(dims.total());
      n->name = n->index < dims.states ? "x" + std::to_string(n->index + 1)
                                       : "u" + std::to_string(n->index - dims.states + 1);
      break;
    }
    case 2:
      n->kind = ex::Kind::Constant;
      n->name = "pi";
      n->value = std::numbers::pi;
      break;
    case 3:
      n->kind = ex::Kind::Negate;
      n->args = {random_node(rng, depth - 1, dims)};
      break;
    case 4: {
      static const ex::Function one[] = {ex::Function::Sin, ex::Function::Cos, ex::Function::Tan, ex::Function::Atan,
                                     ex::Function::Exp, ex::Function::Log, ex::Function::Sqrt, ex::Function::Abs};
      static const ex::Function two[] = {ex::Function::Atan2, ex::Function::Min, ex::Function::Max};
      n->kind = ex::Kind::Call;
      if (rng.below(2)) {
        n->function = one[rng.below(8)];
        n->args = {random_node(rng, depth - 1, dims)};
      } else {
        n->function = two[rng.below(3)];
        n->args = {random_node(rng, depth - 1, dims), random_node(rng, depth - 1, dims)};
      }
      break;
    }
    default: {
      static const ex::Kind ops[] = {ex::Kind::Add, ex::Kind::Subtract, ex::Kind::Multiply, ex::Kind::Divide, ex::Kind::Power};
      n->kind = ops[rng.below(5)];
      n->args = {random_node(rng, depth - 1, dims), random_node(rng, depth - 1, dims)};
    }
  }
  return n;
}


// Random model over a random box: up to four cuts, random modes and metadata.
inline pwacut::PwaModel random_model(pwacut::Rng& rng) {
  const std::size_t d = 1 + rng.below(4);
  const std::size_t n = 1 + rng.below(3);
  Vec lo(static_cast<Eigen::Index>(d)), hi(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    lo[static_cast<Eigen::Index>(j)] = rng.uniform(-5, 0);
    hi[static_cast<Eigen::Index>(j)] = lo[static_cast<Eigen::Index>(j)] + rng.uniform(0.1, 7);
  }
  const pwacut::Domain D(lo, hi);
  std::vector<Vec> hs;
  const std::size_t nc = rng.below(5);
  for (std::size_t i = 0; i < nc; ++i) hs.push_back(testing::random_cut(D, rng));
  const auto arr = pwacut::CutArrangement::from_vectors(hs);
  const pwacut::FeasibilityMatrix S = pwacut::chambers(arr, D);
  std::vector<pwacut::AffineMode> modes(S.columns());
  for (auto& m : modes) {
    m.J = Mat::NullaryExpr(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), [&] { return rng.normal() / 3.0; });
    m.K = Vec::NullaryExpr(static_cast<Eigen::Index>(n), [&] { return rng.normal() * 1e3; });
  }
  pwacut::PwaModel model = pwacut::make_model(D, arr, S, modes, rng.below(2) == 1);
  model.metadata.seed = rng.next();
  model.metadata.gamma = rng.uniform();
  model.metadata.max_rel_err = rng.uniform() * 1e-7;
  if (rng.below(2)) {
    model.tolerance_met = rng.below(2) == 1;
    model.history.push_back({1, rng.uniform(), rng.uniform(), rng.uniform(), 2});
  }
  return model;
}

}  // namespace testing
