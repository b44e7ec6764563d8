#pragma once

#include <stdexcept>
#include <string>

namespace selbox {

// Volume / denominator floor shared by inference, losses and metrics.
inline constexpr double kEps = 1e-8;

// Numeric tolerance for feasibility and satisfaction checks.
inline constexpr double kFeasTol = 1e-9;

// Errors caused by bad input (files, CLI arguments, malformed ontologies).
// Everything else derives from InternalError; the CLI maps the two classes
// to distinct exit codes.
class UserError : public std::runtime_error {
public:
  explicit UserError(const std::string& what) : std::runtime_error(what) {}
};

class InternalError : public std::runtime_error {
public:
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

// A probability interval [lower, upper] <= [0, 1].  `vacuous` marks results
// whose premise cannot be met (empty body in every admissible model); the
// bounds carry no information in that case.
struct ProbInterval {
  double lower = 0.0;
  double upper = 1.0;
  bool vacuous = false;

  static ProbInterval vacuous_result() { return {0.0, 1.0, true}; }
  static ProbInterval bounds(double lo, double hi) { return {lo, hi, false}; }

  bool contains(double p, double tol = 0.0) const {
    return !vacuous && p >= lower - tol && p <= upper + tol;
  }
};

} // namespace selbox
