#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwacut {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// The d generating points of a hyperplane are affinely degenerate.
class SingularPoints : public Error {
 public:
  explicit SingularPoints(double cond)
      : Error("hyperplane points are degenerate (condition number " + std::to_string(cond) + ")"),
        condition(cond) {}
  double condition;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class TooManyCuts : public Error {
 public:
  TooManyCuts(std::size_t nc, std::size_t limit)
      : Error("too many cuts: " + std::to_string(nc) + " exceeds the limit of " + std::to_string(limit)),
        cuts(nc),
        limit(limit) {}
  std::size_t cuts;
  std::size_t limit;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// F produced a non-finite value at one of the sample points.
class EvaluationFailure : public Error {
 public:
  EvaluationFailure(const std::string& what, std::vector<double> pt) : Error(what), point(std::move(pt)) {}
  std::vector<double> point;
};

/// Malformed model JSON; `path` is a JSON pointer to the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string p, const std::string& what) : Error(p + ": " + what), path(std::move(p)) {}
  std::string path;
};

}  // namespace pwacut
