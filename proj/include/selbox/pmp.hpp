#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selbox/common.hpp"
#include "selbox/concepts.hpp"

namespace selbox {

// Which premise contributes the slack term of the upper bound.  The proved
// bound uses 1 - l1; the replication variant uses 1 - l2 instead.
enum class PmpSlack : std::uint8_t { FirstPremise, SecondPremise };

// Probabilistic modus ponens: from (A|Q1)[l1,u1] and (Q2|A and Q1)[l2,u2]
// derive (Q2|Q1) in [l1*l2, min(1, u1*u2 + 1 - l1)].
ProbInterval pmp(double l1, double u1, double l2, double u2,
                 PmpSlack slack = PmpSlack::FirstPremise);

// A query (Q2|Q1) paired with the two conditionals that license one modus
// ponens step through a mediating name A:
//   premise1 = (A|Q1)[l1,u1],  premise2 = (Q2|A and Q1)[l2,u2].
struct PmpPremises {
  Conditional query;
  std::string mediator;
  double l1 = 0.0, u1 = 1.0;
  double l2 = 0.0, u2 = 1.0;
};

// Looks for premises for (head|body) in t.  Matching is syntactic on
// canonical forms (conjunctions flattened and sorted); the mediator is the
// lexicographically smallest name for which both premises are present, and
// within one mediator the earliest conditionals in t win.
std::optional<PmpPremises> find_premises(const TBox& t, const Concept& head,
                                         const Concept& body);

// find_premises + pmp.  Requires both premises to carry point probabilities.
ProbInterval pmp_bounds_for_query(const TBox& training, const Concept& head,
                                  const Concept& body,
                                  PmpSlack slack = PmpSlack::FirstPremise);
ProbInterval pmp_bounds(const PmpPremises& premises,
                        PmpSlack slack = PmpSlack::FirstPremise);

// The concept name that appears as the body of the largest number of
// conditionals (bodies that are exactly a name; ties break toward the
// lexicographically smallest).  Errors if no conditional has a name body.
std::string most_general_concept(const TBox& t);

struct QuerySet {
  std::vector<PmpPremises> queries;
  TBox training;          // input minus the accepted queries
  std::string focus;      // shared body name of all queries
};

// Samples query conditionals among those whose body is the most general
// concept.  Seeded shuffle, then candidates are accepted while premises for
// them survive in the remaining TBox; target count = round(fraction * pool).
// A final sweep drops accepted queries whose premises were themselves
// sampled away (dropped conditionals return to the training TBox).
QuerySet generate_query_set(const TBox& t, double fraction, std::uint64_t seed);

} // namespace selbox
