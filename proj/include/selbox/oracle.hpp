#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "selbox/common.hpp"
#include "selbox/concepts.hpp"
#include "selbox/simplex.hpp"

namespace selbox {

// Exact role-free reasoning.  An interpretation over k concept names is
// summarized by the mass it puts on each of the 2^k membership bitmasks
// (types); every conditional then becomes two homogeneous inequalities over
// the type masses, and query bounds are linear programs.

inline constexpr std::size_t kMaxOracleNames = 12;

class InconsistentError : public UserError {
public:
  InconsistentError() : UserError("TBox is inconsistent") {}
};

struct TypeSystem {
  std::vector<std::string> names; // sorted, unique, size <= kMaxOracleNames

  static TypeSystem over(const TBox& t);
  static TypeSystem over(const TBox& t, const Concept& head, const Concept& body);

  std::size_t num_types() const { return std::size_t{1} << names.size(); }

  // Per-type membership flags for a role-free concept.  Type bit i is the
  // membership of names[i].
  std::vector<char> extension(const Concept& c) const;
};

// The homogeneous system: two rows per conditional over 2^k non-negative
// type masses, no normalization, zero objective.
LinearProgram compile_constraints(const TBox& t, const TypeSystem& ts);

// Feasibility of the constraints plus total mass 1 (interpretations have
// nonempty domains, so the all-zero solution does not count).
bool check_consistency(const TBox& t);

// Tightest interval for (head|body) over all satisfying interpretations
// with nonempty body: normalize mass(body) = 1 and min/maximize the mass of
// body-and-head.  Vacuous when the body is empty in every model; throws
// InconsistentError when no model exists at all.
ProbInterval query_bounds(const TBox& t, const Concept& head, const Concept& body);

// Independent cross-check: enumerate every assignment of up to max_domain
// elements to types (at most 3 names) and scan satisfying interpretations
// directly.  Same Vacuous / InconsistentError contract, except inconsistency
// here only means "no model within the explored domain sizes".
ProbInterval brute_force_bounds(const TBox& t, const Concept& head,
                                const Concept& body, std::size_t max_domain = 5,
                                std::size_t max_names = 3);

} // namespace selbox
