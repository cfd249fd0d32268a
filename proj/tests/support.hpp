#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "infinir/parser.hpp"
#include "infinir/relation.hpp"

namespace infinir::test {

// Brute-force oracles, kept independent of the implementation paths they check.

/// Truncation-comparison oracle for bisimilarity: equal truncations at every
/// level up to |s|*|t| iff the unfoldings are equal.
inline bool oracle_bisimilar(const RationalTerm& s, const RationalTerm& t) {
  int bound = s.size() * t.size() + 1;
  for (int k = 0; k <= bound; ++k)
    if (!(truncate(s, k) == truncate(t, k))) return false;
  return true;
}

/// First level at which truncations differ, as a distance.
inline DyadicDistance oracle_distance(const RationalTerm& s, const RationalTerm& t) {
  int bound = s.size() * t.size() + 1;
  for (int k = 0; k <= bound; ++k)
    if (!(truncate(s, k) == truncate(t, k))) return DyadicDistance::exp(k - 1);
  return DyadicDistance::zero();
}

/// All subterm graphs of t (rooted at each node), canonicalized.
inline std::vector<RationalTerm> all_subterms(const RationalTerm& t) {
  std::vector<RationalTerm> out;
  for (int i = 0; i < t.size(); ++i) {
    RationalTerm sub = t;
    sub.root = i;
    out.push_back(minimize(sub));
  }
  return out;
}

/// Brute-force matcher: tries every substitution whose range consists of
/// subterms of t and checks instance equality by bisimilarity.
inline std::optional<Substitution> oracle_match(const FiniteTerm& lhs, const RationalTerm& t,
                                                const Signature& sig) {
  std::vector<std::string> vars;
  {
    std::vector<const FiniteTerm*> stack{&lhs};
    std::set<std::string> seen;
    while (!stack.empty()) {
      const FiniteTerm* cur = stack.back();
      stack.pop_back();
      if (cur->is_var && seen.insert(cur->label).second) vars.push_back(cur->label);
      for (const FiniteTerm& c : cur->children) stack.push_back(&c);
    }
  }
  std::vector<RationalTerm> pool = all_subterms(t);
  std::vector<size_t> pick(vars.size(), 0);
  RationalTerm pattern = from_finite(lhs, sig);
  for (;;) {
    Substitution sigma;
    for (size_t v = 0; v < vars.size(); ++v) sigma[vars[v]] = pool[pick[v]];
    if (bisimilar(substitute(pattern, sigma), t)) return sigma;
    if (vars.empty()) return std::nullopt;
    size_t v = 0;
    while (v < vars.size() && ++pick[v] == pool.size()) pick[v++] = 0;
    if (v == vars.size()) return std::nullopt;
  }
}

/// Random rational term: a random labeled graph over the signature, minimized.
inline RationalTerm random_term(std::mt19937& rng, const Signature& sig, int max_nodes,
                                const std::vector<std::string>& vars = {}) {
  std::vector<std::pair<std::string, int>> symbols(sig.symbols().begin(), sig.symbols().end());
  int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
  RationalTerm t;
  for (int i = 0; i < n; ++i) {
    bool make_var = !vars.empty() && rng() % 8 == 0;
    if (make_var) {
      t.nodes.push_back({vars[rng() % vars.size()], true, {}});
      continue;
    }
    const auto& [label, arity] = symbols[rng() % symbols.size()];
    TermNode node{label, false, {}};
    for (int c = 0; c < arity; ++c) node.children.push_back(static_cast<int>(rng() % n));
    t.nodes.push_back(std::move(node));
  }
  t.root = 0;
  return minimize(t);
}

inline RationalTerm term_of(const Signature& sig, const std::string& text) {
  return parse_term(text, sig);
}

inline std::vector<int> node_edges(const ProofNode& n) {
  std::vector<int> out;
  for (const PremiseItem& item : n.premise)
    if (!item.step) out.push_back(item.node);
  for (int e : n.edges) out.push_back(e);
  return out;
}

/// Edges that close a cycle in the DFS unfolding from the root.
inline int count_back_edges(const ProofGraph& p) {
  int count = 0;
  std::set<int> on_stack, done;
  std::function<void(int)> dfs = [&](int v) {
    on_stack.insert(v);
    for (int w : node_edges(p.nodes[static_cast<size_t>(v)])) {
      if (on_stack.count(w)) {
        ++count;
        continue;
      }
      if (!done.count(w)) dfs(w);
    }
    on_stack.erase(v);
    done.insert(v);
  };
  dfs(p.root);
  return count;
}

inline int count_nodes(const ProofGraph& p, Judgment j) {
  int count = 0;
  for (const ProofNode& n : p.nodes) count += n.judgment == j;
  return count;
}

inline int count_root_steps(const ProofGraph& p) {
  int count = 0;
  for (const ProofNode& n : p.nodes)
    for (const PremiseItem& item : n.premise) count += item.step.has_value();
  return count;
}

/// A corpus instance: a ground system plus a closed universe over it.
struct CorpusSystem {
  std::string source;
  Workspace ws;
  Universe universe;
};

/// Deterministic corpus of ground systems over at most 3 symbols whose
/// universes close within the budget.
inline std::vector<CorpusSystem> make_corpus(int want, unsigned seed, int universe_budget,
                                             int max_universe = 12) {
  std::vector<CorpusSystem> out;
  std::mt19937 rng(seed);
  const std::vector<std::vector<std::pair<std::string, int>>> signatures = {
      {{"a", 0}, {"b", 0}, {"f", 1}},
      {{"a", 0}, {"f", 1}, {"g", 1}},
      {{"a", 0}, {"b", 0}, {"g", 2}},
      {{"a", 0}, {"f", 1}, {"h", 2}},
  };

  auto random_ground = [&](const std::vector<std::pair<std::string, int>>& symbols, int depth,
                           auto&& self) -> std::string {
    for (;;) {
      const auto& [label, arity] = symbols[rng() % symbols.size()];
      if (arity > 0 && depth == 0) continue;
      if (arity == 0) return label;
      std::string s = label + "(";
      for (int i = 0; i < arity; ++i) {
        if (i) s += ",";
        s += self(symbols, depth - 1, self);
      }
      return s + ")";
    }
  };

  int attempts = 0;
  while (static_cast<int>(out.size()) < want && attempts < want * 60) {
    ++attempts;
    const auto& symbols = signatures[rng() % signatures.size()];
    int rule_count = 1 + static_cast<int>(rng() % 4);
    std::string text;
    for (int r = 0; r < rule_count; ++r)
      text += random_ground(symbols, 1 + static_cast<int>(rng() % 2), random_ground) + " -> " +
              random_ground(symbols, 1 + static_cast<int>(rng() % 2), random_ground) + "\n";
    CorpusSystem sys;
    sys.source = text;
    try {
      sys.ws = parse_trs_file(text);
    } catch (const Error&) {
      continue;
    }
    std::vector<RationalTerm> seeds;
    for (const Rule& rule : sys.ws.trs.rules) {
      seeds.push_back(from_finite(rule.lhs, sys.ws.trs.signature));
      seeds.push_back(rule.rhs);
    }
    // One rational seed per unary symbol: its omega-iteration.
    for (const auto& [label, arity] : symbols)
      if (arity == 1 && sys.ws.trs.signature.arity(label) == 1)
        seeds.push_back(make_term(sys.ws.trs.signature, {},
                                  TermExpr::rec("X", TermExpr::app(label, {TermExpr::name("X")}),
                                                TermExpr::name("X"))));
    sys.universe = close_universe(seeds, sys.ws.trs, RelationKind::BI, universe_budget);
    if (!sys.universe.closed || sys.universe.size() > max_universe) continue;
    out.push_back(std::move(sys));
  }
  return out;
}

}  // namespace infinir::test
