#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "selbox/concepts.hpp"
#include "selbox/oracle.hpp"
#include "selbox/parse.hpp"

using namespace selbox;

namespace {

const char* kStudentKb =
    "cond 0.2 0.2 CS | S\n"
    "cond 0.8 0.8 UG | CS\n"
    "gci CS S\n"
    "gci UG S\n";

ProbInterval ask(const TBox& t, const char* query) {
  auto [head, body] = parse_query(query);
  return query_bounds(t, head, body);
}

// Random role-free TBoxes over few names with small-denominator bounds, so
// the brute-force enumerator has a chance of hitting the witnesses.
TBox random_small_tbox(std::mt19937_64& rng) {
  const std::vector<std::string> names = {"A", "B", "C"};
  std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
  std::uniform_int_distribution<int> denom(1, 5);
  std::uniform_int_distribution<int> len(1, 3);
  TBox t;
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    Concept body = Concept::atomic(names[pick(rng)]);
    Concept head = Concept::atomic(names[pick(rng)]);
    int d = denom(rng);
    std::uniform_int_distribution<int> num(0, d);
    int a = num(rng), b = num(rng);
    t.conditionals.push_back(make_conditional(
        body, head, double(std::min(a, b)) / d, double(std::max(a, b)) / d));
  }
  return t;
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("student knowledge base") {
  TBox t = parse_tbox(kStudentKb);
  ProbInterval r = ask(t, "UG | S");
  REQUIRE_FALSE(r.vacuous);
  CHECK(std::abs(r.lower - 0.16) < 1e-9);
  CHECK(std::abs(r.upper - 0.96) < 1e-9);

  // The conjunctive variant pins down to the point 0.16.
  ProbInterval q = ask(t, "(and UG CS) | S");
  REQUIRE_FALSE(q.vacuous);
  CHECK(q.lower == doctest::Approx(0.16).epsilon(1e-6));
  CHECK(q.upper == doctest::Approx(0.16).epsilon(1e-6));
}

TEST_CASE("empty TBox is uninformative") {
  TBox t;
  ProbInterval r = query_bounds(t, Concept::atomic("D"), Concept::atomic("C"));
  REQUIRE_FALSE(r.vacuous);
  CHECK(r.lower == 0.0);
  CHECK_FALSE(std::signbit(r.lower));
  CHECK(r.upper == 1.0);
}

TEST_CASE("self query is certain") {
  TBox t = parse_tbox("gci A B\n");
  ProbInterval r = ask(t, "A | A");
  REQUIRE_FALSE(r.vacuous);
  CHECK(r.lower == doctest::Approx(1.0));
  CHECK(r.upper == doctest::Approx(1.0));
}

TEST_CASE("subsumption chain entails containment") {
  TBox t = parse_tbox("gci A B\ngci B C\n");
  ProbInterval r = ask(t, "C | A");
  REQUIRE_FALSE(r.vacuous);
  CHECK(r.lower == doctest::Approx(1.0));
  // Conversely (A|C) is unconstrained below.
  ProbInterval s = ask(t, "A | C");
  CHECK(s.lower == doctest::Approx(0.0));
  CHECK(s.upper == doctest::Approx(1.0));
}

TEST_CASE("vacuous when the body must be empty") {
  // (B|A)[1,1] and (B|A)[0,0] force A empty in every model.
  TBox t = parse_tbox("gci A B\ncond 0 0 B | A\n");
  CHECK(check_consistency(t));
  ProbInterval r = ask(t, "B | A");
  CHECK(r.vacuous);
}

TEST_CASE("inconsistency throws") {
  // top <= A forces A nonempty, then the two point bounds clash.
  TBox t = parse_tbox(
      "gci top A\n"
      "cond 0.3 0.3 B | A\n"
      "cond 0.6 0.6 B | A\n");
  CHECK_FALSE(check_consistency(t));
  CHECK_THROWS_AS((void)ask(t, "B | A"), InconsistentError);
}

TEST_CASE("consistency basics") {
  CHECK(check_consistency(TBox{}));
  CHECK(check_consistency(parse_tbox("gci A B\ngci B C\ncond 0.5 0.5 C | A\n")));
  // Without the top constraint the clash is escapable via empty A.
  CHECK(check_consistency(
      parse_tbox("cond 0.3 0.3 B | A\ncond 0.6 0.6 B | A\n")));
}

TEST_CASE("roles are rejected") {
  TBox t = parse_tbox("gci A (some r B)\n");
  CHECK_THROWS_AS((void)check_consistency(t), UserError);
  CHECK_THROWS_AS((void)ask(t, "B | A"), UserError);
}

TEST_CASE("name budget is enforced") {
  TBox t;
  for (int i = 0; i < 13; ++i) {
    t.conditionals.push_back(make_gci(Concept::atomic("A" + std::to_string(i)),
                                      Concept::atomic("A" + std::to_string((i + 1) % 13))));
  }
  CHECK_THROWS_AS((void)check_consistency(t), UserError);
}

TEST_CASE("query names outside the TBox are accommodated") {
  TBox t = parse_tbox("gci A B\n");
  ProbInterval r = ask(t, "Fresh | A");
  REQUIRE_FALSE(r.vacuous);
  CHECK(r.lower == doctest::Approx(0.0));
  CHECK(r.upper == doctest::Approx(1.0));
}

TEST_CASE("bounds are invariant under conditional order") {
  TBox t = parse_tbox(kStudentKb);
  TBox shuffled = t;
  std::reverse(shuffled.conditionals.begin(), shuffled.conditionals.end());
  ProbInterval a = ask(t, "UG | S");
  ProbInterval b = ask(shuffled, "UG | S");
  CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-9));
  CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-9));
}

TEST_CASE("brute force agrees on a divisibility example") {
  TBox t = parse_tbox("cond 0.5 0.5 B | A\n");
  Concept a = Concept::atomic("A"), b = Concept::atomic("B");
  ProbInterval lp = query_bounds(t, b, a);
  ProbInterval bf = brute_force_bounds(t, b, a);
  REQUIRE_FALSE(bf.vacuous);
  CHECK(bf.lower == doctest::Approx(0.5));
  CHECK(bf.upper == doctest::Approx(0.5));
  CHECK(lp.lower == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(lp.upper == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("brute force refuses oversized instances") {
  CHECK_THROWS_AS((void)brute_force_bounds(TBox{}, Concept::atomic("A"),
                                           Concept::atomic("B"), 6, 3),
                  UserError);
  TBox four = parse_tbox("gci A B\ngci C D\n");
  CHECK_THROWS_AS(
      (void)brute_force_bounds(four, Concept::atomic("A"), Concept::atomic("B")),
      UserError);
}

TEST_CASE("brute force intervals are contained in LP intervals") {
  // The enumerator explores only domains up to 5 elements, a subset of all
  // models, so its interval can only be tighter.
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int round = 0; round < 60; ++round) {
    TBox t = random_small_tbox(rng);
    Concept head = Concept::atomic(round % 2 ? "A" : "B");
    Concept body = Concept::atomic(round % 3 ? "B" : "C");
    ProbInterval lp, bf;
    try {
      lp = query_bounds(t, head, body);
      bf = brute_force_bounds(t, head, body);
    } catch (const InconsistentError&) {
      continue;
    }
    if (lp.vacuous) {
      CHECK(bf.vacuous);
      continue;
    }
    if (bf.vacuous) continue; // no small-domain witness; nothing to compare
    CHECK(bf.lower >= lp.lower - 1e-9);
    CHECK(bf.upper <= lp.upper + 1e-9);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("interval widening loosens entailed bounds monotonically") {
  TBox narrow = parse_tbox("cond 0.4 0.6 B | A\ngci top A\n");
  TBox wide = parse_tbox("cond 0.3 0.7 B | A\ngci top A\n");
  ProbInterval rn = ask(narrow, "B | A");
  ProbInterval rw = ask(wide, "B | A");
  CHECK(rw.lower <= rn.lower + 1e-9);
  CHECK(rw.upper >= rn.upper - 1e-9);
}

} // TEST_SUITE
