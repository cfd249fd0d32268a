#include <doctest.h>

#include <functional>

#include "support.hpp"

using namespace infinir;
using namespace infinir::test;

namespace {

// The running example: f(x,x) -> D, a -> C(a), b -> C(b).
Workspace example_two() {
  return parse_trs_file("f(x,x) -> D\na -> C(a)\nb -> C(b)\n");
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("check_rule") {
  Workspace ws = parse_trs_file("C(a) -> a\n");
  const Signature& sig = ws.trs.signature;
  CHECK(ws.trs.rules.size() == 1);
  CHECK(ws.trs.rules[0].invertible);

  CHECK(code_of([&] {
          check_rule(FiniteTerm{"x", true, {}}, term_of(sig, "a"), sig);
        }) == "LhsIsVariable");
  CHECK(code_of([&] {
          FiniteTerm lhs{"C", false, {FiniteTerm{"x", true, {}}}};
          check_rule(lhs, term_of(sig, "x"), sig);
        }) == "");
  CHECK(code_of([&] {
          FiniteTerm lhs{"C", false, {FiniteTerm{"x", true, {}}}};
          check_rule(lhs, term_of(sig, "y"), sig);
        }) == "FreeVariableInRhs");

  Workspace ex2 = example_two();
  CHECK(ex2.trs.rules.size() == 3);
  CHECK_FALSE(ex2.trs.rules[0].left_linear);
  CHECK_FALSE(ex2.trs.rules[0].invertible);
}

TEST_CASE("match_root on rational terms") {
  Workspace ws = example_two();
  const Signature& sig = ws.trs.signature;
  RationalTerm comega = term_of(sig, "rec X = C(X) in X");
  RationalTerm pair = substitute(term_of(sig, "f(x,x)"), {{"x", comega}});

  auto sigma = match_root(ws.trs.rules[0].lhs, pair);
  REQUIRE(sigma.has_value());
  CHECK(sigma->at("x") == comega);

  CHECK_FALSE(match_root(ws.trs.rules[0].lhs, term_of(sig, "f(a,b)")).has_value());
  Workspace ground = parse_trs_file("C(a) -> a\n");
  auto empty = match_root(ground.trs.rules[0].lhs, term_of(ground.trs.signature, "C(a)"));
  REQUIRE(empty.has_value());
  CHECK(empty->empty());
}

TEST_CASE("match_root agrees with the brute-force matcher at desk scale") {
  Workspace ws = example_two();
  const Signature& sig = ws.trs.signature;
  std::mt19937 rng(41);
  for (int i = 0; i < 120; ++i) {
    RationalTerm t = random_term(rng, sig, 6);
    for (const Rule& rule : ws.trs.rules) {
      auto fast = match_root(rule.lhs, t);
      auto slow = oracle_match(rule.lhs, t, sig);
      CHECK(fast.has_value() == slow.has_value());
      if (fast && slow)
        CHECK(bisimilar(substitute(from_finite(rule.lhs, sig), *fast), t));
    }
  }
}

TEST_CASE("root_steps") {
  Workspace ws = example_two();
  const Signature& sig = ws.trs.signature;
  auto steps = root_steps(term_of(sig, "a"), ws.trs);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].target == term_of(sig, "C(a)"));

  Workspace ground = parse_trs_file("C(a) -> a\n");
  CHECK(root_steps(term_of(ground.trs.signature, "rec X = C(X) in X"), ground.trs).empty());
  CHECK(root_steps(term_of(sig, "b"), ws.trs).size() == 1);
  CHECK(root_steps(term_of(sig, "D"), ws.trs).empty());
}

TEST_CASE("step_at") {
  Workspace ws = parse_trs_file("C(a) -> a\na -> C(a)\nterm shape = f(a,b)\n");
  const Signature& sig = ws.trs.signature;
  CHECK(step_at(term_of(sig, "f(C(a), b)"), {1}, 0, ws.trs) == term_of(sig, "f(a,b)"));
  CHECK(step_at(term_of(sig, "f(a,b)"), {1}, 1, ws.trs) == term_of(sig, "f(C(a),b)"));
  CHECK(code_of([&] {
          step_at(term_of(sig, "rec X = C(X) in X"), {1, 1}, 0, ws.trs);
        }) == "NoMatch");

  // Rewriting one occurrence of a shared node must not touch the others.
  RationalTerm shared = term_of(sig, "f(C(a), C(a))");
  RationalTerm stepped = step_at(shared, {1}, 0, ws.trs);
  CHECK(stepped == term_of(sig, "f(a, C(a))"));
}

TEST_CASE("step_at source and target relation") {
  Workspace ws = example_two();
  const Signature& sig = ws.trs.signature;
  std::mt19937 rng(17);
  for (int i = 0; i < 60; ++i) {
    RationalTerm t = random_term(rng, sig, 5);
    for (const Position& p : positions_up_to(t, 2)) {
      for (size_t r = 0; r < ws.trs.rules.size(); ++r) {
        RationalTerm sub = subterm_at(t, p);
        auto sigma = match_root(ws.trs.rules[r].lhs, sub);
        if (!sigma) {
          CHECK(code_of([&] { step_at(t, p, static_cast<int>(r), ws.trs); }) == "NoMatch");
          continue;
        }
        RationalTerm u = step_at(t, p, static_cast<int>(r), ws.trs);
        CHECK(bisimilar(subterm_at(u, p), substitute(ws.trs.rules[r].rhs, *sigma)));
        // Positions disjoint from p keep their labels.
        for (const Position& q : positions_up_to(t, 2)) {
          bool related = true;
          for (size_t k = 0; k < std::min(p.size(), q.size()); ++k)
            if (p[k] != q[k]) {
              related = false;
              break;
            }
          if (related) continue;
          CHECK(truncate(subterm_at(t, q), 1) == truncate(subterm_at(u, q), 1));
        }
      }
    }
  }
}

TEST_CASE("is_left_linear") {
  CHECK_FALSE(is_left_linear(example_two().trs));
  CHECK(is_left_linear(parse_trs_file("C(a) -> a\n").trs));
  CHECK(is_left_linear(parse_trs_file("f(x,y) -> g(x)\n").trs));
}

TEST_CASE("redex_nodes") {
  Workspace ws = example_two();
  const Signature& sig = ws.trs.signature;
  CHECK(redex_nodes(term_of(sig, "D"), ws.trs).empty());

  RationalTerm fab = term_of(sig, "f(a,b)");
  std::set<int> redexes = redex_nodes(fab, ws.trs);
  CHECK(redexes.size() == 2);
  CHECK_FALSE(redexes.count(fab.root));

  Workspace ground = parse_trs_file("C(a) -> a\n");
  CHECK(redex_nodes(term_of(ground.trs.signature, "rec X = C(X) in X"), ground.trs).empty());
}

TEST_CASE("finite_reductions") {
  Workspace ws = example_two();
  const Signature& sig = ws.trs.signature;

  auto reductions = finite_reductions(term_of(sig, "a"), ws.trs, 2, 2);
  bool found = false;
  for (const FiniteReduction& red : reductions)
    if (replay(red, ws.trs) == term_of(sig, "C(C(a))") && red.steps.size() == 2) found = true;
  CHECK(found);

  CHECK(finite_reductions(term_of(sig, "a"), ws.trs, 0, 2).size() == 1);
  CHECK(finite_reductions(term_of(sig, "D"), ws.trs, 3, 3).size() == 1);

  // Larger bounds enumerate a superset, and every reduction replays.
  auto small = finite_reductions(term_of(sig, "f(a,b)"), ws.trs, 2, 1);
  auto large = finite_reductions(term_of(sig, "f(a,b)"), ws.trs, 3, 2);
  CHECK(large.size() > small.size());
  auto key = [](const FiniteReduction& red) {
    std::string k;
    for (const Step& s : red.steps) k += print_position(s.pos) + "/" + std::to_string(s.rule) + ";";
    return k;
  };
  std::set<std::string> large_keys;
  for (const FiniteReduction& red : large) {
    large_keys.insert(key(red));
    CHECK_NOTHROW(replay(red, ws.trs));
  }
  for (const FiniteReduction& red : small) CHECK(large_keys.count(key(red)));
}
