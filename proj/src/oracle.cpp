#include "selbox/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <utility>

namespace selbox {

namespace {

void collect_names(const Concept& c, std::set<std::string>& out) {
  switch (c.kind()) {
  case ConceptKind::Atomic:
    out.insert(c.name());
    break;
  case ConceptKind::And:
    collect_names(c.left(), out);
    collect_names(c.right(), out);
    break;
  case ConceptKind::Exists:
    throw UserError("role restrictions are not supported by the exact oracle");
  default:
    break;
  }
}

TypeSystem build(std::set<std::string>&& names) {
  if (names.size() > kMaxOracleNames)
    throw UserError("exact oracle supports at most " +
                    std::to_string(kMaxOracleNames) + " concept names");
  TypeSystem ts;
  ts.names.assign(names.begin(), names.end());
  return ts;
}

} // namespace

TypeSystem TypeSystem::over(const TBox& t) {
  std::set<std::string> names;
  for (const Conditional& c : t.conditionals) {
    collect_names(c.head, names);
    collect_names(c.body, names);
  }
  return build(std::move(names));
}

TypeSystem TypeSystem::over(const TBox& t, const Concept& head, const Concept& body) {
  std::set<std::string> names;
  for (const Conditional& c : t.conditionals) {
    collect_names(c.head, names);
    collect_names(c.body, names);
  }
  collect_names(head, names);
  collect_names(body, names);
  return build(std::move(names));
}

std::vector<char> TypeSystem::extension(const Concept& c) const {
  const std::size_t n = num_types();
  switch (c.kind()) {
  case ConceptKind::Top:
    return std::vector<char>(n, 1);
  case ConceptKind::Bottom:
    return std::vector<char>(n, 0);
  case ConceptKind::Atomic: {
    auto it = std::lower_bound(names.begin(), names.end(), c.name());
    if (it == names.end() || *it != c.name())
      throw InternalError("concept name missing from the type system: " + c.name());
    const auto bit = static_cast<std::size_t>(it - names.begin());
    std::vector<char> out(n, 0);
    for (std::size_t t = 0; t < n; ++t)
      out[t] = static_cast<char>((t >> bit) & 1u);
    return out;
  }
  case ConceptKind::And: {
    std::vector<char> a = extension(c.left());
    const std::vector<char> b = extension(c.right());
    for (std::size_t t = 0; t < n; ++t) a[t] = a[t] && b[t];
    return a;
  }
  case ConceptKind::Exists:
    throw UserError("role restrictions are not supported by the exact oracle");
  }
  throw InternalError("unhandled concept kind");
}

LinearProgram compile_constraints(const TBox& t, const TypeSystem& ts) {
  const std::size_t n = ts.num_types();
  LinearProgram lp(n);
  for (const Conditional& c : t.conditionals) {
    const std::vector<char> body = ts.extension(c.body);
    const std::vector<char> head = ts.extension(c.head);
    // l*mass(body) <= mass(body&head) <= u*mass(body), written over the
    // types inside the body.  Rows that follow from x >= 0 alone (l = 0 or
    // u = 1) are omitted.
    if (c.lower > 0.0) {
      std::vector<double> low(n, 0.0);
      for (std::size_t k = 0; k < n; ++k)
        if (body[k]) low[k] = (head[k] ? 1.0 : 0.0) - c.lower;
      lp.add_constraint(std::move(low), LpRel::Ge, 0.0);
    }
    if (c.upper < 1.0) {
      std::vector<double> high(n, 0.0);
      for (std::size_t k = 0; k < n; ++k)
        if (body[k]) high[k] = (head[k] ? 1.0 : 0.0) - c.upper;
      lp.add_constraint(std::move(high), LpRel::Le, 0.0);
    }
  }
  return lp;
}

bool check_consistency(const TBox& t) {
  const TypeSystem ts = TypeSystem::over(t);
  LinearProgram lp = compile_constraints(t, ts);
  lp.add_constraint(std::vector<double>(ts.num_types(), 1.0), LpRel::Eq, 1.0);
  return solve_min(lp).status == LpStatus::Optimal;
}

ProbInterval query_bounds(const TBox& t, const Concept& head, const Concept& body) {
  const TypeSystem ts = TypeSystem::over(t, head, body);
  const std::size_t n = ts.num_types();
  const LinearProgram base = compile_constraints(t, ts);

  {
    LinearProgram feas = base;
    feas.add_constraint(std::vector<double>(n, 1.0), LpRel::Eq, 1.0);
    if (solve_min(feas).status != LpStatus::Optimal) throw InconsistentError();
  }

  // Homogeneity lets us normalize mass(body) = 1 and read the proportion
  // straight off the mass of body-and-head.
  const std::vector<char> body_ext = ts.extension(body);
  const std::vector<char> head_ext = ts.extension(head);
  LinearProgram lp = base;
  std::vector<double> norm(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    norm[k] = body_ext[k] ? 1.0 : 0.0;
    lp.objective[k] = (body_ext[k] && head_ext[k]) ? 1.0 : 0.0;
  }
  lp.add_constraint(std::move(norm), LpRel::Eq, 1.0);

  const LpResult lo = solve_min(lp);
  if (lo.status == LpStatus::Infeasible) return ProbInterval::vacuous_result();
  const LpResult hi = solve_max(lp);
  if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
    throw InternalError("query bounds program is unbounded");
  double lower = std::clamp(lo.objective, 0.0, 1.0);
  double upper = std::clamp(hi.objective, 0.0, 1.0);
  lower = std::min(lower, upper);
  if (lower == 0.0) lower = std::abs(lower); // never report -0
  if (upper == 0.0) upper = std::abs(upper);
  return ProbInterval::bounds(lower, upper);
}

ProbInterval brute_force_bounds(const TBox& t, const Concept& head,
                                const Concept& body, std::size_t max_domain,
                                std::size_t max_names) {
  if (max_domain > 5 || max_names > 3)
    throw UserError("brute force is limited to domains of 5 and 3 names");
  const TypeSystem ts = TypeSystem::over(t, head, body);
  if (ts.names.size() > max_names)
    throw UserError("brute force instance has too many concept names");
  const std::size_t n = ts.num_types();

  struct CondExt {
    std::vector<char> body, both;
    double l, u;
  };
  std::vector<CondExt> conds;
  conds.reserve(t.conditionals.size());
  for (const Conditional& c : t.conditionals) {
    CondExt ce;
    ce.body = ts.extension(c.body);
    const std::vector<char> h = ts.extension(c.head);
    ce.both.resize(n);
    for (std::size_t k = 0; k < n; ++k) ce.both[k] = ce.body[k] && h[k];
    ce.l = c.lower;
    ce.u = c.upper;
    conds.push_back(std::move(ce));
  }
  const std::vector<char> qbody = ts.extension(body);
  const std::vector<char> qhead = ts.extension(head);
  std::vector<char> qboth(n);
  for (std::size_t k = 0; k < n; ++k) qboth[k] = qbody[k] && qhead[k];

  bool any_model = false;
  bool any_nonempty_body = false;
  double lo = 1.0, hi = 0.0;
  std::vector<std::size_t> counts(n, 0);

  auto mass = [&](const std::vector<char>& ext) {
    std::size_t s = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (ext[k]) s += counts[k];
    return static_cast<double>(s);
  };
  auto evaluate = [&]() {
    for (const CondExt& ce : conds) {
      const double mb = mass(ce.body);
      if (mb == 0.0) continue; // empty body: vacuously satisfied
      const double mbh = mass(ce.both);
      if (mbh + kFeasTol < ce.l * mb || mbh > ce.u * mb + kFeasTol) return;
    }
    any_model = true;
    const double qb = mass(qbody);
    if (qb == 0.0) return;
    any_nonempty_body = true;
    const double p = mass(qboth) / qb;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  };
  std::function<void(std::size_t, std::size_t)> assign =
      [&](std::size_t idx, std::size_t remaining) {
        if (idx + 1 == n) {
          counts[idx] = remaining;
          evaluate();
          return;
        }
        for (std::size_t c = 0; c <= remaining; ++c) {
          counts[idx] = c;
          assign(idx + 1, remaining - c);
        }
      };
  for (std::size_t d = 1; d <= max_domain; ++d) assign(0, d);

  if (!any_model) throw InconsistentError();
  if (!any_nonempty_body) return ProbInterval::vacuous_result();
  return ProbInterval::bounds(lo, hi);
}

} // namespace selbox
