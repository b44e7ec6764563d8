#pragma once

#include <cstddef>
#include <vector>

#include "selbox/concepts.hpp"

namespace selbox {

// A TBox is in normal form when every conditional is either
//   - deterministic, and its subsumption has one of the shapes
//       A <= B,  A1 and A2 <= B,  A <= some r B,  some r A <= B
//     with A, A1, A2, B concept names or top, or
//   - probabilistic with a concept name on both sides.
bool is_normal_form(const Conditional& c);
bool is_normal_form(const TBox& t);

// Rewrites t into an equivalent normal-form TBox (equivalent in the sense
// that every model of the result, restricted to the original signature, is
// a model of t and vice versa).  Non-deterministic conditionals with a
// compound or top side (C|D)[l,u] are replaced by (A2|A1)[l,u] plus the
// four subsumptions defining A1 = D and A2 = C; deterministic conditionals
// are decomposed with the standard EL rewriting rules.  Fresh names are
// "_N0", "_N1", ... allocated in traversal order, starting above any index
// already present in the input.
TBox normalize(const TBox& t);

// Safety: no probabilistic conditional may mention top, directly or through
// names deterministically equivalent to top.  The check is syntactic: names
// A with both (A|top)[1,1] and (top|A)[1,1] present join top's equivalence
// class, transitively through name-name equivalences.
struct SafetyReport {
  bool safe = true;
  std::vector<std::size_t> offending; // indices of unsafe probabilistic conditionals
};

// Requires a normal-form TBox.
SafetyReport check_safety(const TBox& t);
bool is_safe(const TBox& t);

} // namespace selbox
