#pragma once

#include "pwacut/expr.hpp"
#include "pwacut/geometry.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pwacut::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kEvaluation = 2,
  kToleranceNotMet = 3,
  kValidation = 4,
};

struct DomainSpec {
  Domain domain;
  expr::Dims dims;
};

/// "x1=lo:hi,...,u1=lo:hi,..." with states before inputs. Throws Error.
DomainSpec parse_domain_spec(std::string_view text);

/// Comma-separated floats. Throws Error.
std::vector<double> parse_point(std::string_view text);

/// Runs the command line; progress and diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pwacut::cli
