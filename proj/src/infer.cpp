#include "selbox/infer.hpp"

#include <algorithm>

#include "selbox/losses.hpp"

namespace selbox {

Box box_of(const BoxEmbedding& e, const Concept& c) {
  switch (c.kind()) {
    case ConceptKind::Top:
      throw UserError("top has no finite box; queries must avoid it");
    case ConceptKind::Bottom:
      throw UserError("bottom has no box");
    case ConceptKind::Atomic: {
      auto idx = e.concept_index(c.name());
      if (!idx) throw UserError("concept '" + c.name() + "' is not in the embedding");
      return e.concept_box(*idx);
    }
    case ConceptKind::And:
      return intersect(box_of(e, c.left()), box_of(e, c.right()));
    case ConceptKind::Exists: {
      auto idx = e.role_index(c.role());
      if (!idx) throw UserError("role '" + c.role() + "' is not in the embedding");
      // (some r C) denotes the points the role map sends into C's box.
      return apply_inverse(e.role_map(*idx), box_of(e, c.left()));
    }
  }
  throw InternalError("unreachable concept kind");
}

double point_estimate(const BoxEmbedding& e, const Concept& head, const Concept& body) {
  Box body_box = box_of(e, body);
  double vb = volume(body_box);
  if (vb <= kEps)
    throw DegenerateBodyError("body box of '" + to_string(body) +
                              "' has volume <= 1e-08; the estimate is undefined");
  return volume(intersect(box_of(e, head), body_box)) / vb;
}

SatisfactionResult satisfies(const BoxEmbedding& e, const Conditional& c) {
  SatisfactionResult result;
  if (c.head.kind() == ConceptKind::Top) {
    result.satisfied = true;
    return result;
  }
  Box body_box = box_of(e, c.body);
  double vb = volume(body_box);
  double vx = volume(intersect(box_of(e, c.head), body_box));
  result.satisfied = c.lower * vb <= vx + kFeasTol && vx <= c.upper * vb + kFeasTol;
  try {
    result.violation = axiom_loss_hard(c, e, LossConfig{});
  } catch (const UserError&) {
    // Not a normal-form shape: fall back to the bound violations.
    result.violation = std::max(0.0, c.lower * vb - vx) + std::max(0.0, vx - c.upper * vb);
  }
  return result;
}

ProbInterval ensemble_interval(std::span<const BoxEmbedding> ensemble,
                               const Concept& head, const Concept& body,
                               int* num_skipped) {
  if (ensemble.empty()) throw UserError("ensemble_interval needs at least one embedding");
  int skipped = 0;
  double lo = 1.0, hi = 0.0;
  bool any = false;
  for (const auto& e : ensemble) {
    double p;
    try {
      p = point_estimate(e, head, body);
    } catch (const DegenerateBodyError&) {
      ++skipped;
      continue;
    }
    lo = any ? std::min(lo, p) : p;
    hi = any ? std::max(hi, p) : p;
    any = true;
  }
  if (num_skipped) *num_skipped = skipped;
  if (!any) return ProbInterval::vacuous_result();
  return ProbInterval::bounds(lo, hi);
}

} // namespace selbox
