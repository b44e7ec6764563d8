#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace selbox {

enum class LpRel : std::uint8_t { Le, Ge, Eq };

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded };

// Dense linear program over non-negative variables: optimize objective . x
// subject to rows[i] . x (<=|>=|=) rhs[i], x >= 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<LpRel> rels;
  std::vector<double> rhs;

  explicit LinearProgram(std::size_t n) : num_vars(n), objective(n, 0.0) {}

  void add_constraint(std::vector<double> coeffs, LpRel rel, double b);
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;      // valid when Optimal
  std::vector<double> x;       // valid when Optimal
};

// Two-phase dense primal simplex, Dantzig pricing with a lexicographic
// ratio test, feasibility tolerance 1e-9.  Deterministic: identical inputs
// take identical pivot sequences.
LpResult solve_min(const LinearProgram& lp);
LpResult solve_max(const LinearProgram& lp);

} // namespace selbox
