#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "infinir/term.hpp"

namespace infinir {

/// A rewrite rule with a finite left-hand side and a rational right-hand side.
struct Rule {
  FiniteTerm lhs;
  RationalTerm rhs;
  std::set<std::string> lhs_vars;
  bool left_linear = true;
  /// True when the reversed orientation rhs -> lhs is usable as a pattern:
  /// the rhs is finite and binds every variable of the lhs.
  bool invertible = false;
  std::optional<FiniteTerm> rhs_pattern;  // set iff rhs is finite
  int lhs_pattern_depth = 0;              // height of the lhs as a tree
};

Rule check_rule(const FiniteTerm& lhs, const RationalTerm& rhs, const Signature& sig);

struct Trs {
  Signature signature;
  std::vector<Rule> rules;
};

/// Unique matcher for a finite pattern against a rational term at the root.
/// Repeated pattern variables require bisimilar bindings.
std::optional<Substitution> match_root(const FiniteTerm& lhs, const RationalTerm& t);

struct RootStep {
  int rule = 0;
  Substitution sigma;
  RationalTerm source;
  RationalTerm target;
};

/// One entry per rule whose lhs matches t at the root, in rule order.
std::vector<RootStep> root_steps(const RationalTerm& t, const Trs& trs);

/// Rewrites the occurrence at position p (tree semantics: the path to p is
/// unshared first, so other occurrences of the same node are untouched).
/// Throws InvalidPosition or NoMatch.
RationalTerm step_at(const RationalTerm& t, const Position& p, int rule, const Trs& trs);

bool is_left_linear(const Trs& trs);

/// Graph nodes whose rooted subterm matches some lhs; empty iff normal form.
std::set<int> redex_nodes(const RationalTerm& t, const Trs& trs);

struct Step {
  Position pos;
  int rule = 0;
  Substitution sigma;
};

struct FiniteReduction {
  RationalTerm start;
  std::vector<Step> steps;
};

/// Replays the reduction via step_at and returns the final term.
RationalTerm replay(const FiniteReduction& red, const Trs& trs);

/// All reductions from s of length <= max_len using redex positions of length
/// <= max_depth, breadth-first, (position, rule) lexicographic within a term.
std::vector<FiniteReduction> finite_reductions(const RationalTerm& s, const Trs& trs,
                                               int max_len, int max_depth);

}  // namespace infinir
