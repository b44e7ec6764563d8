#pragma once

#include <span>

#include "selbox/boxes.hpp"
#include "selbox/common.hpp"
#include "selbox/concepts.hpp"
#include "selbox/embedding.hpp"

namespace selbox {

// An embedding read as a geometric interpretation: concepts denote their
// boxes, (and C D) the intersection, (some r C) the preimage of C's box
// under the role's affine map.  Cost is linear in concept size times
// dimension.  Top and the bottom marker have no box; names must be in the
// embedding.
Box box_of(const BoxEmbedding& e, const Concept& c);

class DegenerateBodyError : public UserError {
public:
  explicit DegenerateBodyError(const std::string& what) : UserError(what) {}
};

// vol(box(head) ∩ box(body)) / vol(box(body)), always in [0, 1].
// Bodies with volume <= kEps raise DegenerateBodyError; a silent 0 would
// look like a confident answer.
double point_estimate(const BoxEmbedding& e, const Concept& head, const Concept& body);

struct SatisfactionResult {
  bool satisfied = false;
  // Hard-volume loss of the axiom; diagnostic only.  A zero-volume body
  // satisfies every bound vacuously, yet its loss can be positive because
  // the loss denominators treat empty bodies as maximally violated.
  double violation = 0.0;
};

// Checks l * vol(body) <= vol(head ∩ body) <= u * vol(body) on hard
// volumes with tolerance kFeasTol.
SatisfactionResult satisfies(const BoxEmbedding& e, const Conditional& c);

// [min, max] of the point estimates across an ensemble.  Members whose
// body box is degenerate are skipped (count reported via num_skipped);
// if every member is skipped the result is Vacuous.
ProbInterval ensemble_interval(std::span<const BoxEmbedding> ensemble,
                               const Concept& head, const Concept& body,
                               int* num_skipped = nullptr);

} // namespace selbox
