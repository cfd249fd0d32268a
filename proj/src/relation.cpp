#include "infinir/relation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace infinir {

int PairRelation::count() const {
  int c = 0;
  for (char b : bits) c += b != 0;
  return c;
}

PairRelation PairRelation::full(int size) {
  PairRelation r(size);
  std::fill(r.bits.begin(), r.bits.end(), 1);
  return r;
}

PairRelation PairRelation::identity(int size) {
  PairRelation r(size);
  for (int i = 0; i < size; ++i) r.insert(i, i);
  return r;
}

bool subset(const PairRelation& a, const PairRelation& b) {
  for (size_t i = 0; i < a.bits.size(); ++i)
    if (a.bits[i] && !b.bits[i]) return false;
  return true;
}

PairRelation transpose(const PairRelation& r) {
  PairRelation out(r.n);
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j)
      if (r.contains(i, j)) out.insert(j, i);
  return out;
}

PairRelation union_relation(const PairRelation& a, const PairRelation& b) {
  PairRelation out = a;
  for (size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = out.bits[i] || b.bits[i];
  return out;
}

PairRelation reflexive_transitive_closure(const PairRelation& edges) {
  PairRelation reach = edges;
  for (int i = 0; i < reach.n; ++i) reach.insert(i, i);
  for (int k = 0; k < reach.n; ++k)
    for (int i = 0; i < reach.n; ++i)
      if (reach.contains(i, k))
        for (int j = 0; j < reach.n; ++j)
          if (reach.contains(k, j)) reach.insert(i, j);
  return reach;
}

int Universe::index_of(const RationalTerm& canonical) const {
  auto it = index.find(term_key(canonical));
  return it == index.end() ? -1 : it->second;
}

namespace {

/// Reversed orientations that can be used as patterns: match the rhs, build
/// the lhs instance. Requires a finite rhs binding all lhs variables.
struct ReversedRule {
  int rule;
  FiniteTerm pattern;        // the rule's rhs
  RationalTerm replacement;  // the rule's lhs as a term
};

std::vector<ReversedRule> reversed_rules(const Trs& trs) {
  std::vector<ReversedRule> out;
  for (size_t r = 0; r < trs.rules.size(); ++r) {
    const Rule& rule = trs.rules[r];
    if (!rule.invertible) continue;
    out.push_back({static_cast<int>(r), *rule.rhs_pattern,
                   from_finite(rule.lhs, trs.signature)});
  }
  return out;
}

}  // namespace

Universe build_universe(std::vector<RationalTerm> terms, const Trs& trs, RelationKind kind,
                        bool saturated) {
  Universe u;
  u.kind = kind;
  for (RationalTerm& t : terms) {
    RationalTerm canonical = minimize(t);
    std::string key = term_key(canonical);
    if (u.index.count(key)) continue;
    u.index.emplace(std::move(key), u.size());
    u.terms.push_back(std::move(canonical));
  }
  bool locally_closed = true;
  u.child_index.resize(u.terms.size());
  for (int i = 0; i < u.size(); ++i) {
    const RationalTerm& t = u.terms[static_cast<size_t>(i)];
    int arity = static_cast<int>(t.node(t.root).children.size());
    for (int c = 1; c <= arity; ++c) {
      int idx = u.index_of(subterm_at(t, {c}));
      if (idx < 0) locally_closed = false;
      u.child_index[static_cast<size_t>(i)].push_back(idx);
    }
    for (const RootStep& step : root_steps(t, trs)) {
      int to = u.index_of(step.target);
      if (to < 0) {
        locally_closed = false;
        continue;
      }
      u.edges.push_back({i, to, step.rule, step.sigma});
    }
  }
  // A rule whose preimages cannot be enumerated poisons closure for any member
  // that could lift into one of its redexes.
  bool veto = false;
  for (const Rule& rule : trs.rules) {
    if (rule.invertible) continue;
    const std::string& root_symbol = rule.lhs.label;
    for (const RationalTerm& t : u.terms) {
      const TermNode& root = t.node(t.root);
      if (!root.is_var && root.label == root_symbol) {
        veto = true;
        break;
      }
    }
    if (veto) break;
  }
  u.closed = saturated && locally_closed && !veto;
  return u;
}

namespace {

struct ClosureResult {
  std::vector<RationalTerm> terms;
  bool saturated = true;
};

ClosureResult closure_terms(const std::vector<RationalTerm>& seeds, const Trs& trs,
                            int budget, int max_term_nodes, bool with_instances = true) {
  ClosureResult result;
  std::map<std::string, int> seen;
  std::deque<int> worklist;

  auto add = [&](const RationalTerm& canonical) -> bool {
    std::string key = term_key(canonical);
    if (seen.count(key)) return true;
    if (static_cast<int>(result.terms.size()) >= budget ||
        canonical.size() > max_term_nodes) {
      result.saturated = false;
      return false;
    }
    seen.emplace(std::move(key), static_cast<int>(result.terms.size()));
    worklist.push_back(static_cast<int>(result.terms.size()));
    result.terms.push_back(canonical);
    return true;
  };

  for (const RationalTerm& s : seeds) add(minimize(s));
  std::vector<ReversedRule> reversed = reversed_rules(trs);

  auto drain = [&]() {
    while (!worklist.empty()) {
      int i = worklist.front();
      worklist.pop_front();
      RationalTerm t = result.terms[static_cast<size_t>(i)];
      int arity = static_cast<int>(t.node(t.root).children.size());
      for (int c = 1; c <= arity; ++c) add(subterm_at(t, {c}));
      for (const RootStep& step : root_steps(t, trs)) add(step.target);
      for (const ReversedRule& rev : reversed) {
        auto sigma = match_root(rev.pattern, t);
        if (sigma) add(substitute(rev.replacement, *sigma));
      }
    }
  };

  drain();
  if (!with_instances) return result;
  // Relevant lhs instances: rules whose lhs root occurs as a member root get
  // instantiated over the current set, then the basic closure reruns.
  for (;;) {
    size_t before = result.terms.size();
    for (size_t r = 0; r < trs.rules.size(); ++r) {
      const Rule& rule = trs.rules[r];
      if (rule.lhs.is_var) continue;
      bool relevant = false;
      for (const RationalTerm& t : result.terms) {
        const TermNode& root = t.node(t.root);
        if (!root.is_var && root.label == rule.lhs.label) {
          relevant = true;
          break;
        }
      }
      if (!relevant) continue;
      std::vector<std::string> vars(rule.lhs_vars.begin(), rule.lhs_vars.end());
      RationalTerm pattern = from_finite(rule.lhs, trs.signature);
      // Enumerate sigma over current members, index-lexicographically.
      size_t pool = result.terms.size();
      std::vector<size_t> pick(vars.size(), 0);
      for (;;) {
        if (static_cast<int>(result.terms.size()) >= budget) {
          result.saturated = false;
          break;
        }
        Substitution sigma;
        int estimate = pattern.size();
        for (size_t v = 0; v < vars.size(); ++v) {
          sigma[vars[v]] = result.terms[pick[v]];
          estimate += result.terms[pick[v]].size();
        }
        if (estimate <= max_term_nodes) add(substitute(pattern, sigma));
        if (vars.empty()) break;
        size_t v = 0;
        while (v < vars.size() && ++pick[v] == pool) pick[v++] = 0;
        if (v == vars.size()) break;
      }
      if (!result.saturated && static_cast<int>(result.terms.size()) >= budget) break;
    }
    drain();
    if (result.terms.size() == before) break;
    if (!result.saturated && static_cast<int>(result.terms.size()) >= budget) break;
  }
  return result;
}

}  // namespace

Universe close_universe(const std::vector<RationalTerm>& seeds, const Trs& trs,
                        RelationKind kind, int node_budget) {
  if (node_budget <= 0) fail("InvalidBudget", "universe budget must be positive");
  ClosureResult c = closure_terms(seeds, trs, node_budget, 1 << 20);
  return build_universe(std::move(c.terms), trs, kind, c.saturated);
}

PairRelation lift(const PairRelation& r, const Universe& u) {
  PairRelation out = PairRelation::identity(u.size());
  for (int i = 0; i < u.size(); ++i) {
    const TermNode& a = u.terms[static_cast<size_t>(i)].node(u.terms[static_cast<size_t>(i)].root);
    if (a.is_var) continue;
    for (int j = 0; j < u.size(); ++j) {
      const TermNode& b =
          u.terms[static_cast<size_t>(j)].node(u.terms[static_cast<size_t>(j)].root);
      if (b.is_var || a.label != b.label || a.children.size() != b.children.size()) continue;
      bool all = true;
      for (size_t c = 0; c < a.children.size() && all; ++c) {
        int ci = u.child_index[static_cast<size_t>(i)][c];
        int cj = u.child_index[static_cast<size_t>(j)][c];
        all = ci >= 0 && cj >= 0 && r.contains(ci, cj);
      }
      if (all) out.insert(i, j);
    }
  }
  return out;
}

namespace {

PairRelation generator_edges(const Universe& u, RelationKind kind) {
  PairRelation gen(u.size());
  for (const UniverseEdge& e : u.edges) gen.insert(e.from, e.to);
  if (kind == RelationKind::IEQ) {
    for (const UniverseEdge& e : u.edges) gen.insert(e.to, e.from);
  }
  return gen;
}

PairRelation union_of(const PairRelation& a, const PairRelation& b) {
  PairRelation out = a;
  for (size_t i = 0; i < out.bits.size(); ++i) out.bits[i] |= b.bits[i];
  return out;
}

/// Relational composition a ; b.
PairRelation compose(const PairRelation& a, const PairRelation& b) {
  PairRelation out(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k)
      if (a.contains(i, k))
        for (int j = 0; j < a.n; ++j)
          if (b.contains(k, j)) out.insert(i, j);
  return out;
}

/// Reflexive closure of paths with at most max_steps edges.
PairRelation bounded_star(const PairRelation& edges, int max_steps) {
  PairRelation reach = PairRelation::identity(edges.n);
  PairRelation frontier = reach;
  for (int s = 0; s < max_steps; ++s) {
    PairRelation next = compose(frontier, edges);
    PairRelation merged = union_of(reach, next);
    if (merged == reach) break;
    frontier = next;
    reach = merged;
  }
  return reach;
}

PairRelation nu_fixpoint(const Universe& u, const PairRelation& gen, int max_split) {
  PairRelation r = PairRelation::full(u.size());
  for (;;) {
    PairRelation next = bounded_star(union_of(gen, lift(r, u)), max_split);
    if (next == r) return r;
    r = next;
  }
}

std::vector<PairRelation> ired_stages(const Universe& u, const PairRelation& gen,
                                      int max_split) {
  std::vector<PairRelation> stages;
  PairRelation outer(u.size());  // R_0 = empty
  for (;;) {
    PairRelation pre = bounded_star(union_of(gen, lift(outer, u)), max_split);
    PairRelation inner = PairRelation::full(u.size());
    for (;;) {
      PairRelation next = compose(pre, lift(inner, u));
      if (next == inner) break;
      inner = next;
    }
    if (!stages.empty() && inner == outer) break;
    stages.push_back(inner);
    outer = std::move(inner);
  }
  return stages;
}

int effective_split(const Universe& u, int max_split) {
  return max_split > 0 ? max_split : std::max(1, u.size());
}

}  // namespace

SolveTrace solve_relation(const Universe& u, RelationKind kind, const Trs& trs, int max_split) {
  (void)trs;
  SolveTrace trace;
  trace.kind = kind;
  trace.max_split = effective_split(u, max_split);
  PairRelation gen = generator_edges(u, kind);
  if (kind == RelationKind::IRED) {
    trace.stages = ired_stages(u, gen, trace.max_split);
    trace.final = trace.stages.back();
  } else {
    trace.final = nu_fixpoint(u, gen, trace.max_split);
    trace.stages = {trace.final};
  }
  return trace;
}

PairRelation decide_nu(const Universe& u, RelationKind kind, const Trs& trs) {
  if (kind == RelationKind::IRED) fail("UnknownRelation", "decide_nu handles ieq and bi only");
  if (!u.closed) fail("UniverseNotClosed", "exact solving needs a closed universe");
  return solve_relation(u, kind, trs, -1).final;
}

PairRelation decide_ired(const Universe& u, const Trs& trs) {
  if (!u.closed) fail("UniverseNotClosed", "exact solving needs a closed universe");
  return solve_relation(u, RelationKind::IRED, trs, -1).final;
}

PairRelation decide_nu_generated(const Universe& u, const PairRelation& generator) {
  if (!u.closed) fail("UniverseNotClosed", "exact solving needs a closed universe");
  return nu_fixpoint(u, generator, std::max(1, u.size()));
}

PairRelation ired_round(const Universe& u, const Trs& trs, const PairRelation& outer) {
  (void)trs;
  PairRelation gen = generator_edges(u, RelationKind::IRED);
  PairRelation pre = bounded_star(union_of(gen, lift(outer, u)), std::max(1, u.size()));
  PairRelation inner = PairRelation::full(u.size());
  for (;;) {
    PairRelation next = compose(pre, lift(inner, u));
    if (next == inner) return inner;
    inner = next;
  }
}

namespace {

/// Rebuilds certificates from a solve trace. Relation goals are shared by
/// pair, so repeated goals become back-edges.
struct CertificateBuilder {
  const Universe& u;
  const Trs& trs;
  const SolveTrace& trace;
  ProofGraph graph;
  std::map<std::pair<int, int>, int> rel_nodes;
  std::map<std::tuple<int, int, bool>, int> down_nodes;

  // Edge payloads sorted deterministically: forward by rule, then (IEQ only)
  // backward by rule.
  struct GenEdge {
    int to;
    int rule;
    StepDir dir;
    const Substitution* sigma;
  };
  std::vector<std::vector<GenEdge>> gen;

  CertificateBuilder(const Universe& uni, const Trs& t, const SolveTrace& tr)
      : u(uni), trs(t), trace(tr) {
    graph.kind = trace.kind;
    gen.resize(static_cast<size_t>(u.size()));
    std::vector<const UniverseEdge*> sorted;
    for (const UniverseEdge& e : u.edges) sorted.push_back(&e);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const UniverseEdge* a, const UniverseEdge* b) {
                       return std::tie(a->from, a->rule, a->to) <
                              std::tie(b->from, b->rule, b->to);
                     });
    for (const UniverseEdge* e : sorted)
      gen[static_cast<size_t>(e->from)].push_back({e->to, e->rule, StepDir::Fwd, &e->sigma});
    if (trace.kind == RelationKind::IEQ)
      for (const UniverseEdge* e : sorted)
        gen[static_cast<size_t>(e->to)].push_back({e->from, e->rule, StepDir::Bwd, &e->sigma});
  }

  int stage_of(int i, int j) const {
    for (size_t k = 0; k < trace.stages.size(); ++k)
      if (trace.stages[k].contains(i, j)) return static_cast<int>(k);
    return -1;
  }

  bool liftable(int x, int j, const PairRelation& rel) const {
    if (x == j) return true;
    const RationalTerm& a = u.terms[static_cast<size_t>(x)];
    const RationalTerm& b = u.terms[static_cast<size_t>(j)];
    const TermNode& ra = a.node(a.root);
    const TermNode& rb = b.node(b.root);
    if (ra.is_var || rb.is_var || ra.label != rb.label ||
        ra.children.size() != rb.children.size())
      return false;
    for (size_t c = 0; c < ra.children.size(); ++c) {
      int ci = u.child_index[static_cast<size_t>(x)][c];
      int cj = u.child_index[static_cast<size_t>(j)][c];
      if (ci < 0 || cj < 0 || !rel.contains(ci, cj)) return false;
    }
    return true;
  }

  int down_node(int a, int b, bool marked) {
    auto key = std::make_tuple(a, b, marked);
    auto it = down_nodes.find(key);
    if (it != down_nodes.end()) return it->second;
    int idx = static_cast<int>(graph.nodes.size());
    graph.nodes.emplace_back();
    down_nodes.emplace(key, idx);
    ProofNode& node = graph.nodes[static_cast<size_t>(idx)];
    node.judgment = marked ? Judgment::DownFin : Judgment::Down;
    node.lhs = u.terms[static_cast<size_t>(a)];
    node.rhs = u.terms[static_cast<size_t>(b)];
    if (a == b) {
      node.rule = ProofNode::RuleKind::Id;
      return idx;
    }
    node.rule = ProofNode::RuleKind::Lift;
    size_t arity = u.child_index[static_cast<size_t>(a)].size();
    std::vector<int> edges;
    for (size_t c = 0; c < arity; ++c) {
      int ci = u.child_index[static_cast<size_t>(a)][c];
      int cj = u.child_index[static_cast<size_t>(b)][c];
      edges.push_back(rel_node(ci, cj));
    }
    graph.nodes[static_cast<size_t>(idx)].edges = std::move(edges);
    return idx;
  }

  int rel_node(int i, int j) {
    auto key = std::make_pair(i, j);
    auto it = rel_nodes.find(key);
    if (it != rel_nodes.end()) return it->second;
    int idx = static_cast<int>(graph.nodes.size());
    graph.nodes.emplace_back();
    rel_nodes.emplace(key, idx);
    {
      ProofNode& node = graph.nodes[static_cast<size_t>(idx)];
      node.judgment = Judgment::Rel;
      node.rule = ProofNode::RuleKind::Split;
      node.lhs = u.terms[static_cast<size_t>(i)];
      node.rhs = u.terms[static_cast<size_t>(j)];
    }

    bool ired = trace.kind == RelationKind::IRED;
    int stage = ired ? stage_of(i, j) : 0;
    const PairRelation& final_rel = trace.stages[static_cast<size_t>(stage)];
    // Pre-chain lift edges: previous stage for IRED, the fixed point otherwise.
    const PairRelation* pre_rel = nullptr;
    PairRelation empty_rel(u.size());
    if (ired)
      pre_rel = stage > 0 ? &trace.stages[static_cast<size_t>(stage - 1)] : &empty_rel;
    else
      pre_rel = &final_rel;

    // BFS for the shortest admissible chain from i; for IRED the chain must
    // end at some x with (x, j) liftable in the stage relation, otherwise at j.
    struct Parent {
      int prev = -1;
      bool via_lift = false;
      GenEdge edge{};
    };
    std::vector<Parent> parent(static_cast<size_t>(u.size()));
    std::vector<int> dist(static_cast<size_t>(u.size()), -1);
    std::deque<int> queue{i};
    dist[static_cast<size_t>(i)] = 0;
    int found = -1;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      if (ired ? liftable(x, j, final_rel) : x == j) {
        found = x;
        break;
      }
      if (dist[static_cast<size_t>(x)] >= trace.max_split) continue;
      for (const GenEdge& e : gen[static_cast<size_t>(x)]) {
        if (dist[static_cast<size_t>(e.to)] >= 0) continue;
        dist[static_cast<size_t>(e.to)] = dist[static_cast<size_t>(x)] + 1;
        parent[static_cast<size_t>(e.to)] = {x, false, e};
        queue.push_back(e.to);
      }
      for (int y = 0; y < u.size(); ++y) {
        if (y == x || dist[static_cast<size_t>(y)] >= 0) continue;
        if (!liftable(x, y, *pre_rel)) continue;
        dist[static_cast<size_t>(y)] = dist[static_cast<size_t>(x)] + 1;
        parent[static_cast<size_t>(y)] = {x, true, {}};
        queue.push_back(y);
      }
    }
    if (found < 0) fail("Internal", "fixed point pair has no justification chain");

    std::vector<PremiseItem> chain;
    for (int x = found; x != i;) {
      const Parent& par = parent[static_cast<size_t>(x)];
      PremiseItem item;
      if (par.via_lift) {
        item.node = down_node(par.prev, x, ired);
      } else {
        RootStepItem step;
        step.rule = par.edge.rule;
        step.dir = par.edge.dir;
        step.sigma = *par.edge.sigma;
        item.step = step;
      }
      chain.push_back(std::move(item));
      x = par.prev;
    }
    std::reverse(chain.begin(), chain.end());
    if (ired) {
      PremiseItem final_item;
      final_item.node = down_node(found, j, false);
      chain.push_back(std::move(final_item));
    } else if (chain.empty()) {
      PremiseItem only;
      only.node = down_node(i, j, false);
      chain.push_back(std::move(only));
    }
    graph.nodes[static_cast<size_t>(idx)].premise = std::move(chain);
    return idx;
  }
};

}  // namespace

ProofGraph extract_certificate(const Universe& u, const Trs& trs, const SolveTrace& trace,
                               int from, int to) {
  if (!trace.final.contains(from, to))
    fail("Internal", "pair is not in the solved relation");
  CertificateBuilder builder(u, trs, trace);
  builder.graph.root = builder.rel_node(from, to);
  return std::move(builder.graph);
}

namespace {

/// Rational limits of self-embedding finite reductions: if u reduces to v and
/// v contains u strictly below the root, the loop term rec X = v[u := X] is a
/// candidate reduct of u.
std::vector<RationalTerm> limit_candidates(const RationalTerm& u, const Trs& trs,
                                           int max_term_nodes) {
  std::vector<RationalTerm> out;
  for (const FiniteReduction& red : finite_reductions(u, trs, 2, 2)) {
    if (red.steps.empty()) continue;
    RationalTerm end = replay(red, trs);
    if (end == u) continue;
    int hook = -1;
    for (int i : nodes_bisimilar_to(end, u)) {
      if (i == end.root) continue;
      hook = i;
      break;
    }
    if (hook < 0) continue;
    RationalTerm loop = end;
    for (TermNode& n : loop.nodes)
      for (int& c : n.children)
        if (c == hook) c = loop.root;
    RationalTerm canonical = minimize(loop);
    if (canonical.size() <= max_term_nodes) out.push_back(std::move(canonical));
  }
  return out;
}

}  // namespace

Verdict search_proof(const RationalTerm& s, const RationalTerm& t, RelationKind kind,
                     const Trs& trs, const SearchBudget& budget) {
  if (budget.max_goals <= 0 || budget.max_split <= 0 || budget.max_new_term_nodes <= 0)
    fail("InvalidBudget", "search budget fields must be positive");
  int max_terms = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(budget.max_goals))));
  RationalTerm from = minimize(s), to = minimize(t);

  // Limit enrichment runs on the instance-free closure so that instance
  // blowup cannot crowd the limits out of the budget. A pool that already
  // fills the budget cannot take new terms, so enrichment is skipped; limits
  // are only detected on small candidates.
  ClosureResult base =
      closure_terms({from, to}, trs, max_terms, budget.max_new_term_nodes, false);
  bool saturated = base.saturated;
  std::vector<RationalTerm> pool = std::move(base.terms);
  if (static_cast<int>(pool.size()) < max_terms) {
    size_t base_count = pool.size();
    int enrich_cap = std::max(4, budget.max_new_term_nodes / 8);
    for (size_t i = 0; i < base_count; ++i) {
      if (pool[i].size() > enrich_cap) continue;
      for (RationalTerm& limit : limit_candidates(pool[i], trs, budget.max_new_term_nodes))
        pool.push_back(std::move(limit));
    }
    ClosureResult enriched = closure_terms(pool, trs, max_terms, budget.max_new_term_nodes);
    saturated = enriched.saturated;
    pool = std::move(enriched.terms);
  }

  Universe carrier = build_universe(std::move(pool), trs, kind, saturated);
  SolveTrace trace = solve_relation(carrier, kind, trs, budget.max_split);
  int i = carrier.index_of(from);
  int j = carrier.index_of(to);
  Verdict verdict;
  if (i >= 0 && j >= 0 && trace.final.contains(i, j)) {
    verdict.kind = Verdict::Kind::Proved;
    verdict.certificate = extract_certificate(carrier, trs, trace, i, j);
  }
  return verdict;
}

}  // namespace infinir
