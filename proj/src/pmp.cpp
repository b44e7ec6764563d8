#include "selbox/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <utility>

#include "selbox/rng.hpp"

namespace selbox {

namespace {

void collect_conjuncts(const Concept& c, std::vector<Concept>& out) {
  if (c.kind() == ConceptKind::And) {
    collect_conjuncts(c.left(), out);
    collect_conjuncts(c.right(), out);
  } else {
    out.push_back(c);
  }
}

// Conjunctions flattened, deduplicated and sorted so that syntactically
// shuffled writings of the same conjunction compare equal.
Concept canonical(const Concept& c) {
  switch (c.kind()) {
  case ConceptKind::And: {
    std::vector<Concept> parts;
    collect_conjuncts(c, parts);
    for (Concept& p : parts) p = canonical(p);
    std::sort(parts.begin(), parts.end(), concept_less);
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    Concept result = parts.back();
    for (auto it = std::next(parts.rbegin()); it != parts.rend(); ++it)
      result = Concept::conj(*it, result);
    return result;
  }
  case ConceptKind::Exists:
    return Concept::exists(c.role(), canonical(c.left()));
  default:
    return c;
  }
}

// Premise lookup tables over one TBox.  A mask of removed conditionals lets
// the query sampler test "would premises survive without these axioms"
// without rebuilding anything.
struct PremiseIndex {
  // canonical body text -> (head name, index), heads restricted to names;
  // sorted so mediators come up in lexicographic order, earliest axiom first.
  std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> atomic_heads;
  // canonical body text + '\n' + canonical head text -> indices.
  std::map<std::string, std::vector<std::size_t>> by_body_head;

  static std::string key(const std::string& body, const std::string& head) {
    return body + '\n' + head;
  }

  explicit PremiseIndex(const TBox& t) {
    for (std::size_t i = 0; i < t.conditionals.size(); ++i) {
      const Conditional& c = t.conditionals[i];
      std::string body = to_string(canonical(c.body));
      std::string head = to_string(canonical(c.head));
      if (c.head.is_atomic_name())
        atomic_heads[body].emplace_back(c.head.name(), i);
      by_body_head[key(body, head)].push_back(i);
    }
    for (auto& [body, entries] : atomic_heads)
      std::sort(entries.begin(), entries.end());
  }
};

std::optional<PmpPremises> find_in(const TBox& t, const PremiseIndex& index,
                                   const std::vector<char>& removed,
                                   const Concept& head, const Concept& body) {
  Concept cbody = canonical(body);
  std::string head_text = to_string(canonical(head));
  auto it = index.atomic_heads.find(to_string(cbody));
  if (it == index.atomic_heads.end()) return std::nullopt;

  const auto& entries = it->second;
  std::size_t i = 0;
  while (i < entries.size()) {
    const std::string& mediator = entries[i].first;
    constexpr auto kNone = static_cast<std::size_t>(-1);
    std::size_t p1 = kNone;
    for (; i < entries.size() && entries[i].first == mediator; ++i)
      if (p1 == kNone && !removed[entries[i].second]) p1 = entries[i].second;
    if (p1 == kNone) continue;

    Concept body2 = canonical(Concept::conj(Concept::atomic(mediator), cbody));
    auto it2 = index.by_body_head.find(PremiseIndex::key(to_string(body2), head_text));
    if (it2 == index.by_body_head.end()) continue;
    std::size_t p2 = kNone;
    for (std::size_t idx : it2->second)
      if (!removed[idx] && idx != p1) { p2 = idx; break; }
    if (p2 == kNone) continue;

    PmpPremises out;
    out.query.head = head;
    out.query.body = body;
    out.mediator = mediator;
    out.l1 = t.conditionals[p1].lower;
    out.u1 = t.conditionals[p1].upper;
    out.l2 = t.conditionals[p2].lower;
    out.u2 = t.conditionals[p2].upper;
    return out;
  }
  return std::nullopt;
}

} // namespace

ProbInterval pmp(double l1, double u1, double l2, double u2, PmpSlack slack) {
  auto check = [](double lo, double hi, const char* which) {
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0))
      throw UserError(std::string(which) + " is not a probability interval");
  };
  check(l1, u1, "premise 1");
  check(l2, u2, "premise 2");
  const double slack_term = slack == PmpSlack::FirstPremise ? 1.0 - l1 : 1.0 - l2;
  return ProbInterval::bounds(l1 * l2, std::min(1.0, u1 * u2 + slack_term));
}

std::optional<PmpPremises> find_premises(const TBox& t, const Concept& head,
                                         const Concept& body) {
  PremiseIndex index(t);
  std::vector<char> removed(t.conditionals.size(), 0);
  return find_in(t, index, removed, head, body);
}

ProbInterval pmp_bounds(const PmpPremises& premises, PmpSlack slack) {
  return pmp(premises.l1, premises.u1, premises.l2, premises.u2, slack);
}

ProbInterval pmp_bounds_for_query(const TBox& training, const Concept& head,
                                  const Concept& body, PmpSlack slack) {
  auto premises = find_premises(training, head, body);
  if (!premises)
    throw UserError("query has no premises in the TBox: " + to_string(head) +
                    " | " + to_string(body));
  if (premises->l1 != premises->u1 || premises->l2 != premises->u2)
    throw UserError("premises must carry point probabilities");
  return pmp_bounds(*premises, slack);
}

std::string most_general_concept(const TBox& t) {
  std::map<std::string, std::size_t> counts;
  for (const Conditional& c : t.conditionals)
    if (c.body.is_atomic_name()) ++counts[c.body.name()];
  if (counts.empty())
    throw UserError("no conditional has a concept name as its body");
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [name, count] : counts) {
    if (best == nullptr || count > best_count) {
      best = &name;
      best_count = count;
    }
  }
  return *best;
}

QuerySet generate_query_set(const TBox& t, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw UserError("query fraction must lie in (0, 1]");
  const std::string focus = most_general_concept(t);
  const Concept focus_concept = Concept::atomic(focus);

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < t.conditionals.size(); ++i)
    if (t.conditionals[i].body == focus_concept) pool.push_back(i);
  const auto target =
      std::llround(fraction * static_cast<double>(pool.size()));

  Rng rng(seed);
  rng.shuffle(pool);

  PremiseIndex index(t);
  std::vector<char> removed(t.conditionals.size(), 0);
  std::vector<std::size_t> accepted;
  for (std::size_t cand : pool) {
    if (static_cast<long long>(accepted.size()) >= target) break;
    removed[cand] = 1;
    const Conditional& c = t.conditionals[cand];
    if (find_in(t, index, removed, c.head, c.body)) {
      accepted.push_back(cand);
    } else {
      removed[cand] = 0;
    }
  }

  // Accepting a query may steal a premise from an earlier one; drop queries
  // that lost their support (returning them to the training set frees
  // premises, so sweep until stable).
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < accepted.size();) {
      const Conditional& c = t.conditionals[accepted[k]];
      if (find_in(t, index, removed, c.head, c.body)) {
        ++k;
        continue;
      }
      removed[accepted[k]] = 0;
      accepted.erase(accepted.begin() + static_cast<std::ptrdiff_t>(k));
      changed = true;
    }
  }
  if (accepted.empty())
    throw UserError("no query under body '" + focus + "' has both premises");

  QuerySet out;
  out.focus = focus;
  for (std::size_t i = 0; i < t.conditionals.size(); ++i)
    if (!removed[i]) out.training.conditionals.push_back(t.conditionals[i]);
  for (std::size_t idx : accepted) {
    const Conditional& c = t.conditionals[idx];
    auto premises = find_in(t, index, removed, c.head, c.body);
    if (!premises) throw InternalError("accepted query lost its premises");
    premises->query = c;
    out.queries.push_back(std::move(*premises));
  }
  return out;
}

} // namespace selbox
