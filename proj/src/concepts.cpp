#include "selbox/concepts.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "selbox/common.hpp"

namespace selbox {

Concept Concept::top() {
  static const auto node = std::make_shared<const Node>(Node{ConceptKind::Top, "", nullptr, nullptr});
  return Concept(node);
}

Concept Concept::bottom() {
  static const auto node = std::make_shared<const Node>(Node{ConceptKind::Bottom, "", nullptr, nullptr});
  return Concept(node);
}

Concept Concept::atomic(std::string name) {
  return Concept(std::make_shared<const Node>(Node{ConceptKind::Atomic, std::move(name), nullptr, nullptr}));
}

Concept Concept::conj(Concept lhs, Concept rhs) {
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::And, "", std::move(lhs.node_), std::move(rhs.node_)}));
}

Concept Concept::exists(std::string role, Concept filler) {
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::Exists, std::move(role), std::move(filler.node_), nullptr}));
}

const std::string& Concept::name() const {
  if (node_->kind != ConceptKind::Atomic)
    throw InternalError("name() on a non-atomic concept");
  return node_->name;
}

const std::string& Concept::role() const {
  if (node_->kind != ConceptKind::Exists)
    throw InternalError("role() on a non-existential concept");
  return node_->name;
}

Concept Concept::left() const {
  if (!node_->left) throw InternalError("left() on a leaf concept");
  return Concept(node_->left);
}

Concept Concept::right() const {
  if (!node_->right) throw InternalError("right() on a concept without a right child");
  return Concept(node_->right);
}

bool Concept::equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.name != b.name) return false;
  if (static_cast<bool>(a.left) != static_cast<bool>(b.left)) return false;
  if (static_cast<bool>(a.right) != static_cast<bool>(b.right)) return false;
  if (a.left && !equal(*a.left, *b.left)) return false;
  if (a.right && !equal(*a.right, *b.right)) return false;
  return true;
}

int concept_size(const Concept& c) {
  switch (c.kind()) {
    case ConceptKind::Top:
    case ConceptKind::Bottom:
    case ConceptKind::Atomic:
      return 1;
    case ConceptKind::And:
      return 1 + concept_size(c.left()) + concept_size(c.right());
    case ConceptKind::Exists:
      return 1 + concept_size(c.left());
  }
  throw InternalError("unreachable concept kind");
}

std::string to_string(const Concept& c) {
  switch (c.kind()) {
    case ConceptKind::Top:
      return "top";
    case ConceptKind::Bottom:
      throw InternalError("the bottom marker has no text form");
    case ConceptKind::Atomic:
      return c.name();
    case ConceptKind::And:
      return "(and " + to_string(c.left()) + " " + to_string(c.right()) + ")";
    case ConceptKind::Exists:
      return "(some " + c.role() + " " + to_string(c.left()) + ")";
  }
  throw InternalError("unreachable concept kind");
}

bool concept_less(const Concept& a, const Concept& b) {
  // Leaves order before compounds of the same kind only via the text form;
  // text comparison is total because the grammar is unambiguous.
  return to_string(a) < to_string(b);
}

Concept canonical_and(Concept a, Concept b) {
  if (concept_less(b, a)) std::swap(a, b);
  return Concept::conj(std::move(a), std::move(b));
}

std::string format_probability(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Conditional make_gci(Concept body, Concept head) {
  Conditional c;
  c.head = std::move(head);
  c.body = std::move(body);
  c.lower = c.upper = 1.0;
  c.lower_text = c.upper_text = "1";
  return c;
}

Conditional make_conditional(Concept body, Concept head, double lower, double upper) {
  return make_conditional(std::move(body), std::move(head), lower, upper,
                          format_probability(lower), format_probability(upper));
}

Conditional make_conditional(Concept body, Concept head, double lower, double upper,
                             std::string lower_text, std::string upper_text) {
  if (!(lower >= 0.0) || !(upper <= 1.0) || !(lower <= upper))
    throw UserError("conditional bounds must satisfy 0 <= l <= u <= 1, got [" +
                    format_probability(lower) + ", " + format_probability(upper) + "]");
  Conditional c;
  c.head = std::move(head);
  c.body = std::move(body);
  c.lower = lower;
  c.upper = upper;
  c.lower_text = std::move(lower_text);
  c.upper_text = std::move(upper_text);
  return c;
}

std::optional<std::pair<Concept, Concept>> as_gci(const Conditional& c) {
  if (!c.deterministic()) return std::nullopt;
  return std::make_pair(c.body, c.head);
}

int tbox_size(const TBox& t) {
  int n = 0;
  for (const auto& c : t.conditionals)
    n += concept_size(c.body) + concept_size(c.head);
  return n;
}

namespace {

void collect_names(const Concept& c, std::set<std::string>& concepts,
                   std::set<std::string>& roles) {
  switch (c.kind()) {
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      return;
    case ConceptKind::Atomic:
      concepts.insert(c.name());
      return;
    case ConceptKind::And:
      collect_names(c.left(), concepts, roles);
      collect_names(c.right(), concepts, roles);
      return;
    case ConceptKind::Exists:
      roles.insert(c.role());
      collect_names(c.left(), concepts, roles);
      return;
  }
}

} // namespace

Signature signature_of(const TBox& t) {
  std::set<std::string> concepts, roles;
  for (const auto& c : t.conditionals) {
    collect_names(c.body, concepts, roles);
    collect_names(c.head, concepts, roles);
  }
  Signature sig;
  sig.concepts.assign(concepts.begin(), concepts.end());
  sig.roles.assign(roles.begin(), roles.end());
  return sig;
}

Pnf classify_pnf(const Conditional& c) {
  const bool head_name = c.head.is_atomic_name();
  const bool body_name = c.body.is_atomic_name();
  if (head_name && body_name) return Pnf::Pnf1;
  if (head_name && c.body.kind() == ConceptKind::And &&
      c.body.left().is_atomic_name() && c.body.right().is_atomic_name())
    return Pnf::Pnf2;
  if (head_name && c.body.kind() == ConceptKind::Exists && c.body.left().is_atomic_name())
    return Pnf::Pnf3;
  if (body_name && c.head.kind() == ConceptKind::Exists && c.head.left().is_atomic_name())
    return Pnf::Pnf4;
  return Pnf::Other;
}

const char* pnf_label(Pnf s) {
  switch (s) {
    case Pnf::Pnf1: return "pnf1";
    case Pnf::Pnf2: return "pnf2";
    case Pnf::Pnf3: return "pnf3";
    case Pnf::Pnf4: return "pnf4";
    case Pnf::Other: return "other";
  }
  throw InternalError("unreachable pnf bucket");
}

} // namespace selbox
