#include "selbox/simplex.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "selbox/common.hpp"

namespace selbox {

void LinearProgram::add_constraint(std::vector<double> coeffs, LpRel rel, double b) {
  if (coeffs.size() != num_vars)
    throw InternalError("constraint coefficient count does not match variable count");
  rows.push_back(std::move(coeffs));
  rels.push_back(rel);
  rhs.push_back(b);
}

namespace {

constexpr double kTol = 1e-9;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Standard tableau: rows of [coefficients | rhs] kept in canonical form for
// the current basis, plus a reduced-cost row whose last entry is minus the
// current objective value.
class Tableau {
public:
  Tableau(const LinearProgram& lp) : structural_(lp.num_vars) {
    const std::size_t m = lp.rows.size();
    // Flip rows so every right-hand side is non-negative.
    std::vector<std::vector<double>> rows = lp.rows;
    std::vector<LpRel> rels = lp.rels;
    std::vector<double> rhs = lp.rhs;
    for (std::size_t i = 0; i < m; ++i) {
      if (rhs[i] < 0.0) {
        for (double& v : rows[i]) v = -v;
        rhs[i] = -rhs[i];
        if (rels[i] == LpRel::Le) rels[i] = LpRel::Ge;
        else if (rels[i] == LpRel::Ge) rels[i] = LpRel::Le;
      }
    }

    std::size_t num_slack = 0, num_art = 0;
    for (LpRel r : rels) {
      if (r != LpRel::Eq) ++num_slack;
      if (r != LpRel::Le) ++num_art;
    }
    slack_end_ = structural_ + num_slack;
    cols_ = slack_end_ + num_art;

    a_.assign(m, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m, kNone);
    std::size_t next_slack = structural_;
    std::size_t next_art = slack_end_;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < structural_; ++j) a_[i][j] = rows[i][j];
      a_[i][cols_] = rhs[i];
      if (rels[i] == LpRel::Le) {
        a_[i][next_slack] = 1.0;
        basis_[i] = next_slack++;
      } else if (rels[i] == LpRel::Ge) {
        a_[i][next_slack] = -1.0;
        ++next_slack;
      }
      if (rels[i] != LpRel::Le) {
        a_[i][next_art] = 1.0;
        basis_[i] = next_art++;
      }
    }
  }

  LpStatus solve(const std::vector<double>& objective) {
    if (slack_end_ < cols_) {
      // Phase 1: minimize the sum of artificial variables.
      obj_.assign(cols_ + 1, 0.0);
      for (std::size_t j = slack_end_; j < cols_; ++j) obj_[j] = 1.0;
      for (std::size_t i = 0; i < a_.size(); ++i) {
        if (basis_[i] < slack_end_) continue;
        for (std::size_t j = 0; j <= cols_; ++j) obj_[j] -= a_[i][j];
      }
      if (!pivot_until_optimal()) return LpStatus::Unbounded;
      if (-obj_[cols_] > kTol) return LpStatus::Infeasible;
      drop_artificials();
    }

    obj_.assign(cols_ + 1, 0.0);
    for (std::size_t j = 0; j < structural_; ++j) obj_[j] = objective[j];
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double c = basis_[i] < structural_ ? objective[basis_[i]] : 0.0;
      if (c == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) obj_[j] -= c * a_[i][j];
    }
    if (!pivot_until_optimal()) return LpStatus::Unbounded;
    return LpStatus::Optimal;
  }

  double objective_value() const { return -obj_[cols_]; }

  std::vector<double> solution() const {
    std::vector<double> x(structural_, 0.0);
    for (std::size_t i = 0; i < a_.size(); ++i)
      if (basis_[i] < structural_) x[basis_[i]] = a_[i][cols_];
    return x;
  }

private:
  void pivot(std::size_t r, std::size_t c) {
    const double p = a_[r][c];
    for (double& v : a_[r]) v /= p;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (i == r || a_[i][c] == 0.0) continue;
      const double f = a_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j) a_[i][j] -= f * a_[r][j];
      a_[i][c] = 0.0;
    }
    if (obj_[c] != 0.0) {
      const double f = obj_[c];
      for (std::size_t j = 0; j <= cols_; ++j) obj_[j] -= f * a_[r][j];
      obj_[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Lexicographic comparison of rows r and s scaled by their entries in the
  // entering column.  Columns are scanned rhs first, then the initial basis
  // block (slacks and artificials, where the start tableau is the identity),
  // then the structural columns; with that ordering every starting row is
  // lexicographically positive, which rules out cycling.
  bool lex_less(std::size_t r, std::size_t s, std::size_t enter) const {
    const double pr = a_[r][enter], ps = a_[s][enter];
    auto cmp = [&](std::size_t j) -> int {
      const double d = a_[r][j] / pr - a_[s][j] / ps;
      if (d < -kTol) return -1;
      if (d > kTol) return 1;
      return 0;
    };
    if (int c = cmp(cols_)) return c < 0;
    for (std::size_t j = structural_; j < cols_; ++j)
      if (int c = cmp(j)) return c < 0;
    for (std::size_t j = 0; j < structural_; ++j)
      if (int c = cmp(j)) return c < 0;
    return false;
  }

  // Dantzig pricing with the lexicographic ratio test, which terminates
  // without Bland's crawl on the heavily degenerate distribution polytopes
  // the oracle produces.
  bool pivot_until_optimal() {
    for (std::size_t iter = 0; iter < kMaxIters; ++iter) {
      std::size_t enter = kNone;
      double most_negative = -kTol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (obj_[j] < most_negative) {
          most_negative = obj_[j];
          enter = j;
        }
      }
      if (enter == kNone) return true;

      std::size_t leave = kNone;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < a_.size(); ++i) {
        if (a_[i][enter] <= kTol) continue;
        const double ratio = a_[i][cols_] / a_[i][enter];
        if (ratio < best_ratio - kTol) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio < best_ratio + kTol && leave != kNone &&
                   lex_less(i, leave, enter)) {
          leave = i;
        }
      }
      if (leave == kNone) return false;
      pivot(leave, enter);
    }
    throw InternalError("simplex exceeded the pivot budget");
  }

  // After phase 1, pivot still-basic artificials onto real columns; rows
  // where that is impossible are redundant and dropped.  Artificial columns
  // are then removed entirely so phase 2 cannot re-enter them.
  void drop_artificials() {
    for (std::size_t i = 0; i < a_.size();) {
      if (basis_[i] < slack_end_) { ++i; continue; }
      std::size_t c = kNone;
      for (std::size_t j = 0; j < slack_end_; ++j)
        if (std::fabs(a_[i][j]) > kTol) { c = j; break; }
      if (c != kNone) {
        pivot(i, c);
        ++i;
      } else {
        a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    for (std::size_t i = 0; i < a_.size(); ++i) {
      a_[i][slack_end_] = a_[i][cols_];
      a_[i].resize(slack_end_ + 1);
    }
    cols_ = slack_end_;
  }

  static constexpr std::size_t kMaxIters = 1u << 22;

  std::size_t structural_, slack_end_, cols_;
  std::vector<std::vector<double>> a_;
  std::vector<double> obj_;
  std::vector<std::size_t> basis_;
};

LpResult run(const LinearProgram& lp, const std::vector<double>& objective) {
  Tableau t(lp);
  LpResult result;
  result.status = t.solve(objective);
  if (result.status == LpStatus::Optimal) {
    result.objective = t.objective_value();
    result.x = t.solution();
  }
  return result;
}

} // namespace

LpResult solve_min(const LinearProgram& lp) { return run(lp, lp.objective); }

LpResult solve_max(const LinearProgram& lp) {
  std::vector<double> neg(lp.objective);
  for (double& v : neg) v = -v;
  LpResult result = run(lp, neg);
  result.objective = -result.objective;
  return result;
}

} // namespace selbox
