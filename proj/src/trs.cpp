#include "infinir/trs.hpp"

#include <algorithm>

namespace infinir {

namespace {

void collect_vars(const FiniteTerm& t, std::set<std::string>& vars, bool& linear) {
  if (t.is_var) {
    if (!vars.insert(t.label).second) linear = false;
    return;
  }
  for (const FiniteTerm& c : t.children) collect_vars(c, vars, linear);
}

int pattern_height(const FiniteTerm& t) {
  int best = 0;
  for (const FiniteTerm& c : t.children) best = std::max(best, pattern_height(c));
  return 1 + best;
}

void check_pattern_symbols(const FiniteTerm& t, const Signature& sig) {
  if (t.is_var) return;
  if (t.label == kCutMarker) fail("ReservedSymbol", "'#' cannot occur in a rule");
  auto a = sig.arity(t.label);
  if (!a) fail("UnboundName", "unknown symbol " + t.label);
  if (*a != static_cast<int>(t.children.size()))
    fail("ArityMismatch", t.label + " expects " + std::to_string(*a) + " arguments");
  for (const FiniteTerm& c : t.children) check_pattern_symbols(c, sig);
}

}  // namespace

Rule check_rule(const FiniteTerm& lhs, const RationalTerm& rhs, const Signature& sig) {
  if (lhs.is_var) fail("LhsIsVariable", "left-hand side is the variable " + lhs.label);
  check_pattern_symbols(lhs, sig);
  Rule rule;
  rule.lhs = lhs;
  rule.rhs = minimize(rhs);
  collect_vars(lhs, rule.lhs_vars, rule.left_linear);
  for (const std::string& v : variables_of(rule.rhs))
    if (!rule.lhs_vars.count(v))
      fail("FreeVariableInRhs", "variable " + v + " does not occur in the lhs");
  rule.lhs_pattern_depth = pattern_height(lhs);
  if (is_finite(rule.rhs)) {
    rule.rhs_pattern = to_finite(rule.rhs);
    std::set<std::string> rhs_vars;
    bool rhs_linear = true;
    collect_vars(*rule.rhs_pattern, rhs_vars, rhs_linear);
    rule.invertible = std::includes(rhs_vars.begin(), rhs_vars.end(), rule.lhs_vars.begin(),
                                    rule.lhs_vars.end());
  }
  return rule;
}

namespace {

bool match_node(const FiniteTerm& pat, const RationalTerm& t, int node, Substitution& sigma) {
  if (pat.is_var) {
    RationalTerm sub = t;
    sub.root = node;
    sub = minimize(sub);
    auto [it, fresh] = sigma.emplace(pat.label, sub);
    if (!fresh && !(it->second == sub)) return false;
    return true;
  }
  const TermNode& n = t.node(node);
  if (n.is_var || n.label != pat.label || n.children.size() != pat.children.size()) return false;
  for (size_t i = 0; i < pat.children.size(); ++i)
    if (!match_node(pat.children[i], t, n.children[i], sigma)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match_root(const FiniteTerm& lhs, const RationalTerm& t) {
  Substitution sigma;
  if (!match_node(lhs, t, t.root, sigma)) return std::nullopt;
  return sigma;
}

std::vector<RootStep> root_steps(const RationalTerm& t, const Trs& trs) {
  std::vector<RootStep> out;
  RationalTerm source = minimize(t);
  for (size_t r = 0; r < trs.rules.size(); ++r) {
    auto sigma = match_root(trs.rules[r].lhs, source);
    if (!sigma) continue;
    RootStep step;
    step.rule = static_cast<int>(r);
    step.sigma = *sigma;
    step.source = source;
    step.target = substitute(trs.rules[r].rhs, *sigma);
    out.push_back(std::move(step));
  }
  return out;
}

RationalTerm step_at(const RationalTerm& t, const Position& p, int rule, const Trs& trs) {
  if (rule < 0 || rule >= static_cast<int>(trs.rules.size()))
    fail("NoMatch", "rule index out of range");
  const Rule& r = trs.rules[static_cast<size_t>(rule)];

  RationalTerm work = t;
  // Unshare the path to p so exactly the occurrence at p is rewritten.
  std::vector<int> path_nodes;  // fresh copies along the path, root first
  int cur = work.root;
  {
    TermNode copy = work.node(cur);
    work.nodes.push_back(copy);
    cur = work.size() - 1;
    work.root = cur;
    path_nodes.push_back(cur);
  }
  for (size_t k = 0; k < p.size(); ++k) {
    int i = p[k];
    TermNode& parent = work.nodes[static_cast<size_t>(cur)];
    if (i < 1 || i > static_cast<int>(parent.children.size()))
      fail("InvalidPosition", "position " + print_position(p) + " not in term");
    int child = parent.children[static_cast<size_t>(i - 1)];
    TermNode copy = work.node(child);
    work.nodes.push_back(copy);
    int fresh = work.size() - 1;
    work.nodes[static_cast<size_t>(cur)].children[static_cast<size_t>(i - 1)] = fresh;
    cur = fresh;
    path_nodes.push_back(cur);
  }

  RationalTerm redex = work;
  redex.root = cur;
  auto sigma = match_root(r.lhs, minimize(redex));
  if (!sigma)
    fail("NoMatch", "rule " + std::to_string(rule) + " does not match at " + print_position(p));
  RationalTerm contractum = substitute(r.rhs, *sigma);

  int offset = work.size();
  for (const TermNode& n : contractum.nodes) {
    TermNode copy = n;
    for (int& c : copy.children) c += offset;
    work.nodes.push_back(std::move(copy));
  }
  int contractum_root = contractum.root + offset;
  if (p.empty()) {
    work.root = contractum_root;
  } else {
    int parent = path_nodes[path_nodes.size() - 2];
    work.nodes[static_cast<size_t>(parent)].children[static_cast<size_t>(p.back() - 1)] =
        contractum_root;
  }
  return minimize(work);
}

bool is_left_linear(const Trs& trs) {
  for (const Rule& r : trs.rules)
    if (!r.left_linear) return false;
  return true;
}

std::set<int> redex_nodes(const RationalTerm& t, const Trs& trs) {
  std::set<int> out;
  for (int i = 0; i < t.size(); ++i) {
    RationalTerm sub = t;
    sub.root = i;
    RationalTerm canonical = minimize(sub);
    for (const Rule& r : trs.rules) {
      if (match_root(r.lhs, canonical)) {
        out.insert(i);
        break;
      }
    }
  }
  return out;
}

RationalTerm replay(const FiniteReduction& red, const Trs& trs) {
  RationalTerm cur = minimize(red.start);
  for (const Step& s : red.steps) cur = step_at(cur, s.pos, s.rule, trs);
  return cur;
}

std::vector<FiniteReduction> finite_reductions(const RationalTerm& s, const Trs& trs,
                                               int max_len, int max_depth) {
  std::vector<FiniteReduction> out;
  struct Item {
    FiniteReduction red;
    RationalTerm end;
  };
  std::vector<Item> layer{{FiniteReduction{minimize(s), {}}, minimize(s)}};
  out.push_back(layer[0].red);
  for (int len = 0; len < max_len; ++len) {
    std::vector<Item> next;
    for (const Item& item : layer) {
      for (const Position& p : positions_up_to(item.end, max_depth)) {
        RationalTerm sub = subterm_at(item.end, p);
        for (size_t r = 0; r < trs.rules.size(); ++r) {
          auto sigma = match_root(trs.rules[r].lhs, sub);
          if (!sigma) continue;
          Item ext;
          ext.red = item.red;
          ext.red.steps.push_back({p, static_cast<int>(r), *sigma});
          ext.end = step_at(item.end, p, static_cast<int>(r), trs);
          out.push_back(ext.red);
          next.push_back(std::move(ext));
        }
      }
    }
    layer = std::move(next);
    if (layer.empty()) break;
  }
  return out;
}

}  // namespace infinir
