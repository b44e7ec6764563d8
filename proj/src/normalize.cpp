#include "selbox/normalize.hpp"

#include <charconv>
#include <map>
#include <string>

#include "selbox/common.hpp"
#include "selbox/parse.hpp"

namespace selbox {

namespace {

// Concept names, top and the internal bottom marker may appear as the
// atoms of normal-form subsumptions.
bool is_atom(const Concept& c) {
  return c.kind() == ConceptKind::Atomic || c.kind() == ConceptKind::Top ||
         c.kind() == ConceptKind::Bottom;
}

bool is_nf_gci(const Concept& body, const Concept& head) {
  bool head_ok = is_atom(head) ||
                 (head.kind() == ConceptKind::Exists && is_atom(head.left()));
  if (!head_ok) return false;
  if (is_atom(body)) return true;
  if (body.kind() == ConceptKind::And)
    return is_atom(body.left()) && is_atom(body.right()) && is_atom(head);
  if (body.kind() == ConceptKind::Exists)
    return is_atom(body.left()) && is_atom(head);
  return false;
}

class FreshNames {
public:
  explicit FreshNames(const Signature& sig) {
    for (const auto& name : sig.concepts) {
      if (!is_reserved_name(name)) continue;
      // Only "_N<digits>" advances the counter; other reserved spellings
      // cannot collide with what we generate.
      std::string_view digits = std::string_view(name).substr(2);
      std::uint64_t idx = 0;
      auto res = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
      if (res.ec == std::errc{} && res.ptr == digits.data() + digits.size() &&
          !digits.empty())
        next_ = std::max(next_, idx + 1);
    }
  }

  Concept make() { return Concept::atomic("_N" + std::to_string(next_++)); }

private:
  std::uint64_t next_ = 0;
};

// Applies the EL rewriting rules until body <= head splits into normal-form
// subsumptions, appending them to `out` in rule order.  Every step removes
// one compound subterm, so the recursion terminates.
void emit_gci(const Concept& body, const Concept& head, FreshNames& fresh,
              std::vector<Conditional>& out) {
  const bool body_atom = is_atom(body);
  const bool head_atom = is_atom(head);

  if (!body_atom && !head_atom) {
    // C <= D with both sides compound: introduce C <= A, A <= D.
    Concept a = fresh.make();
    emit_gci(body, a, fresh, out);
    emit_gci(a, head, fresh, out);
    return;
  }

  if (!body_atom) {
    if (body.kind() == ConceptKind::And) {
      Concept l = body.left(), r = body.right();
      if (!is_atom(l)) {
        // C1 and C2 <= B with compound C1: name C1 first.
        Concept a = fresh.make();
        emit_gci(l, a, fresh, out);
        emit_gci(Concept::conj(a, r), head, fresh, out);
        return;
      }
      if (!is_atom(r)) {
        Concept a = fresh.make();
        emit_gci(r, a, fresh, out);
        emit_gci(Concept::conj(l, a), head, fresh, out);
        return;
      }
      out.push_back(make_gci(body, head));
      return;
    }
    // body is (some r C)
    Concept filler = body.left();
    if (!is_atom(filler)) {
      Concept a = fresh.make();
      emit_gci(filler, a, fresh, out);
      emit_gci(Concept::exists(body.role(), a), head, fresh, out);
      return;
    }
    out.push_back(make_gci(body, head));
    return;
  }

  if (!head_atom) {
    if (head.kind() == ConceptKind::And) {
      // B <= D and E splits into B <= D, B <= E.
      emit_gci(body, head.left(), fresh, out);
      emit_gci(body, head.right(), fresh, out);
      return;
    }
    // head is (some r D)
    Concept filler = head.left();
    if (!is_atom(filler)) {
      Concept a = fresh.make();
      emit_gci(a, filler, fresh, out);
      emit_gci(body, Concept::exists(head.role(), a), fresh, out);
      return;
    }
    out.push_back(make_gci(body, head));
    return;
  }

  out.push_back(make_gci(body, head));
}

} // namespace

bool is_normal_form(const Conditional& c) {
  if (c.deterministic()) return is_nf_gci(c.body, c.head);
  return c.body.kind() == ConceptKind::Atomic && c.head.kind() == ConceptKind::Atomic;
}

bool is_normal_form(const TBox& t) {
  for (const auto& c : t.conditionals)
    if (!is_normal_form(c)) return false;
  return true;
}

TBox normalize(const TBox& t) {
  FreshNames fresh(signature_of(t));
  TBox out;
  for (const auto& c : t.conditionals) {
    if (c.deterministic()) {
      emit_gci(c.body, c.head, fresh, out.conditionals);
      continue;
    }
    if (c.body.kind() == ConceptKind::Atomic && c.head.kind() == ConceptKind::Atomic) {
      out.conditionals.push_back(c);
      continue;
    }
    // Probabilistic conditional with a compound or top side: move the
    // probability onto fresh names and pin them to the original concepts
    // with subsumptions in both directions.
    Concept a1 = fresh.make();
    Concept a2 = fresh.make();
    out.conditionals.push_back(
        make_conditional(a1, a2, c.lower, c.upper, c.lower_text, c.upper_text));
    emit_gci(c.body, a1, fresh, out.conditionals);
    emit_gci(a1, c.body, fresh, out.conditionals);
    emit_gci(c.head, a2, fresh, out.conditionals);
    emit_gci(a2, c.head, fresh, out.conditionals);
  }
  return out;
}

SafetyReport check_safety(const TBox& t) {
  if (!is_normal_form(t))
    throw UserError("safety check requires a normal-form TBox");

  // Union-find over {top} + concept names; id 0 is top.
  std::map<std::string, int> ids;
  auto id_of = [&](const Concept& c) {
    if (c.kind() == ConceptKind::Top) return 0;
    auto [it, inserted] = ids.emplace(c.name(), static_cast<int>(ids.size()) + 1);
    return it->second;
  };
  std::vector<int> parent(1, 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  auto name_or_top = [](const Concept& c) {
    return c.kind() == ConceptKind::Atomic || c.kind() == ConceptKind::Top;
  };

  // Collect atomic subsumptions, then union the two-way pairs.
  std::map<std::pair<int, int>, bool> edges;
  for (const auto& c : t.conditionals) {
    if (!c.deterministic()) continue;
    if (!name_or_top(c.body) || !name_or_top(c.head)) continue;
    int b = id_of(c.body), h = id_of(c.head);
    while (static_cast<int>(parent.size()) < static_cast<int>(ids.size()) + 1)
      parent.push_back(static_cast<int>(parent.size()));
    edges[{b, h}] = true;
  }
  for (const auto& [edge, present] : edges) {
    (void)present;
    auto [b, h] = edge;
    if (edges.count({h, b})) {
      int rb = find(b), rh = find(h);
      if (rb != rh) parent[std::max(rb, rh)] = std::min(rb, rh);
    }
  }

  SafetyReport report;
  for (std::size_t i = 0; i < t.conditionals.size(); ++i) {
    const auto& c = t.conditionals[i];
    if (c.deterministic()) continue;
    bool unsafe = false;
    for (const Concept* side : {&c.body, &c.head}) {
      if (side->kind() == ConceptKind::Top) {
        unsafe = true;
        continue;
      }
      auto it = ids.find(side->name());
      if (it != ids.end() && find(it->second) == find(0)) unsafe = true;
    }
    if (unsafe) {
      report.safe = false;
      report.offending.push_back(i);
    }
  }
  return report;
}

bool is_safe(const TBox& t) { return check_safety(t).safe; }

} // namespace selbox
