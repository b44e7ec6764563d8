#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace selbox {

// =====================================================================
// EL concept descriptions: top | name | (and C D) | (some r C).
// Nodes are immutable and shared, so copies are cheap.  Bottom exists as
// an internal marker for unsatisfiable superclasses; it has no surface
// syntax and neither the parser nor the generator ever produces it.
// =====================================================================

enum class ConceptKind : std::uint8_t { Top, Bottom, Atomic, And, Exists };

class Concept {
public:
  Concept() : Concept(top()) {}

  static Concept top();
  static Concept bottom();
  static Concept atomic(std::string name);
  static Concept conj(Concept lhs, Concept rhs);
  static Concept exists(std::string role, Concept filler);

  ConceptKind kind() const { return node_->kind; }
  bool is_atomic_name() const { return node_->kind == ConceptKind::Atomic; }

  // Atomic only.
  const std::string& name() const;
  // Exists only.
  const std::string& role() const;
  // And: left/right conjunct.  Exists: filler is left().
  Concept left() const;
  Concept right() const;

  bool operator==(const Concept& other) const { return equal(*node_, *other.node_); }
  bool operator!=(const Concept& other) const { return !(*this == other); }

private:
  struct Node {
    ConceptKind kind;
    std::string name; // Atomic: concept name; Exists: role name
    std::shared_ptr<const Node> left, right;
  };

  explicit Concept(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static bool equal(const Node& a, const Node& b);

  std::shared_ptr<const Node> node_;
};

// Number of constructors in the description (top/bottom/name count 1,
// (and C D) counts 1 + size C + size D, (some r C) counts 1 + size C).
int concept_size(const Concept& c);

// Grammar text: "top", names verbatim, "(and C D)", "(some r C)".
// Bottom has no text form; serializing it throws InternalError.
std::string to_string(const Concept& c);

// And with operands in lexicographic order of their text form.  Premise
// lookup and the generator agree on this ordering.
Concept canonical_and(Concept a, Concept b);

// Total order used for canonicalization and deterministic iteration.
bool concept_less(const Concept& a, const Concept& b);

// =====================================================================
// Conditionals (D|C)[l,u]: "given C, the proportion that is also D lies
// in [l,u]".  l = u = 1 encodes the subsumption C <= D.
// =====================================================================

struct Conditional {
  Concept head; // D
  Concept body; // C
  double lower = 1.0;
  double upper = 1.0;
  // Decimal text of the bounds as parsed or authored; serialization echoes
  // it verbatim so files round-trip byte for byte.
  std::string lower_text = "1";
  std::string upper_text = "1";

  bool deterministic() const { return lower == 1.0 && upper == 1.0; }
  bool point() const { return lower == upper; }
};

// (head|body)[1,1], the conditional form of the subsumption body <= head.
Conditional make_gci(Concept body, Concept head);

// Probabilistic conditional; validates 0 <= l <= u <= 1 and renders the
// bound text with the shortest round-trip decimal form.
Conditional make_conditional(Concept body, Concept head, double lower, double upper);
Conditional make_conditional(Concept body, Concept head, double lower, double upper,
                             std::string lower_text, std::string upper_text);

// Subsumption view: (body, head) if the conditional is deterministic.
std::optional<std::pair<Concept, Concept>> as_gci(const Conditional& c);

// Shortest decimal string that parses back to exactly x.
std::string format_probability(double x);

// =====================================================================
// TBox: an ordered list of conditionals.
// =====================================================================

struct TBox {
  std::vector<Conditional> conditionals;

  std::size_t size() const { return conditionals.size(); }
};

// Total concept constructors over all bodies and heads.
int tbox_size(const TBox& t);

struct Signature {
  std::vector<std::string> concepts; // sorted, unique
  std::vector<std::string> roles;    // sorted, unique
};

Signature signature_of(const TBox& t);

// =====================================================================
// Probabilistic normal form: the four conditional shapes the pipeline
// supports end to end, classified on the original (pre-normalization)
// syntax.  Metrics are reported per shape.
// =====================================================================

enum class Pnf : std::uint8_t {
  Pnf1,  // (B | A)           names on both sides
  Pnf2,  // (B | A1 and A2)
  Pnf3,  // (B | some r A)
  Pnf4,  // (some r B | A)
  Other,
};

inline constexpr int kNumPnfBuckets = 5;

Pnf classify_pnf(const Conditional& c);

// Stable label for report columns: pnf1..pnf4, other.
const char* pnf_label(Pnf s);

} // namespace selbox
