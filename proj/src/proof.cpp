#include "infinir/proof.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace infinir {

std::string kind_name(RelationKind k) {
  switch (k) {
    case RelationKind::IEQ: return "ieq";
    case RelationKind::BI: return "bi";
    case RelationKind::IRED: return "ired";
  }
  return "?";
}

RelationKind kind_from_name(const std::string& name) {
  if (name == "ieq") return RelationKind::IEQ;
  if (name == "bi") return RelationKind::BI;
  if (name == "ired") return RelationKind::IRED;
  fail("UnknownRelation", name);
}

namespace {

struct Checker {
  const ProofGraph& p;
  const Trs& trs;
  ValidationReport report;

  void violation(int node, std::string code, std::string message) {
    report.ok = false;
    report.violations.push_back({node, std::move(code), std::move(message)});
  }

  bool node_in_range(int i) const { return i >= 0 && i < static_cast<int>(p.nodes.size()); }

  void check_split(int idx) {
    const ProofNode& node = p.nodes[static_cast<size_t>(idx)];
    RationalTerm current = minimize(node.lhs);
    bool chain_ok = true;
    for (size_t k = 0; k < node.premise.size(); ++k) {
      const PremiseItem& item = node.premise[k];
      bool final_item = (k + 1 == node.premise.size());
      if (item.step) {
        const RootStepItem& s = *item.step;
        if (s.rule < 0 || s.rule >= static_cast<int>(trs.rules.size())) {
          violation(idx, "BadRootStep", "rule index out of range");
          chain_ok = false;
          break;
        }
        if (s.dir == StepDir::Bwd && p.kind != RelationKind::IEQ) {
          violation(idx, "BadRootStep", "backward step outside an equational proof");
          chain_ok = false;
          break;
        }
        const Rule& rule = trs.rules[static_cast<size_t>(s.rule)];
        RationalTerm lhs_inst = substitute(from_finite(rule.lhs, trs.signature), s.sigma);
        RationalTerm rhs_inst = substitute(rule.rhs, s.sigma);
        const RationalTerm& src = s.dir == StepDir::Fwd ? lhs_inst : rhs_inst;
        const RationalTerm& tgt = s.dir == StepDir::Fwd ? rhs_inst : lhs_inst;
        if (!bisimilar(src, current)) {
          violation(idx, "BadRootStep",
                    "step source " + print_term(src) + " differs from " + print_term(current));
          chain_ok = false;
          break;
        }
        if (s.dir == StepDir::Fwd && !match_root(rule.lhs, current)) {
          violation(idx, "BadRootStep", "lhs does not match " + print_term(current));
          chain_ok = false;
          break;
        }
        current = tgt;
      } else {
        if (!node_in_range(item.node)) {
          violation(idx, "DanglingEdge", "premise edge out of range");
          chain_ok = false;
          break;
        }
        const ProofNode& target = p.nodes[static_cast<size_t>(item.node)];
        if (target.judgment == Judgment::Rel) {
          violation(idx, "BadPremise", "split premise edge must target a lift judgment");
          chain_ok = false;
          break;
        }
        if (p.kind == RelationKind::IRED) {
          if (final_item && target.judgment != Judgment::Down)
            violation(idx, "BadPremise", "final premise item must be an unmarked lift");
          if (!final_item && target.judgment != Judgment::DownFin)
            violation(idx, "BadPremise", "non-final lift items must be marked");
        } else if (target.judgment == Judgment::DownFin) {
          violation(idx, "BadPremise", "marked lift outside an ired proof");
        }
        if (!bisimilar(minimize(target.lhs), current)) {
          violation(idx, "BadChain", "premise does not chain at item " + std::to_string(k));
          chain_ok = false;
          break;
        }
        current = minimize(target.rhs);
      }
    }
    if (p.kind == RelationKind::IRED &&
        (node.premise.empty() || node.premise.back().step.has_value()))
      violation(idx, "BadPremise", "ired split must end with a lift item");
    if (chain_ok && !bisimilar(current, minimize(node.rhs)))
      violation(idx, "BadChain", "premise ends at " + print_term(current) + ", goal needs " +
                                     print_term(minimize(node.rhs)));
  }

  void check_lift(int idx) {
    const ProofNode& node = p.nodes[static_cast<size_t>(idx)];
    RationalTerm lhs = minimize(node.lhs);
    RationalTerm rhs = minimize(node.rhs);
    const TermNode& l = lhs.node(lhs.root);
    const TermNode& r = rhs.node(rhs.root);
    if (l.is_var || r.is_var || l.label != r.label || l.children.size() != r.children.size()) {
      violation(idx, "LiftRootMismatch", "lift goals must share a root symbol");
      return;
    }
    if (node.edges.size() != l.children.size()) {
      violation(idx, "LiftArity", "expected " + std::to_string(l.children.size()) + " edges");
      return;
    }
    for (size_t i = 0; i < node.edges.size(); ++i) {
      if (!node_in_range(node.edges[i])) {
        violation(idx, "DanglingEdge", "lift edge out of range");
        continue;
      }
      const ProofNode& child = p.nodes[static_cast<size_t>(node.edges[i])];
      if (child.judgment != Judgment::Rel) {
        violation(idx, "BadPremise", "lift edges must target relation goals");
        continue;
      }
      Position pos{static_cast<int>(i) + 1};
      if (!bisimilar(minimize(child.lhs), subterm_at(lhs, pos)) ||
          !bisimilar(minimize(child.rhs), subterm_at(rhs, pos)))
        violation(idx, "BadChain", "lift argument " + std::to_string(i + 1) + " mismatch");
    }
  }

  void check_global_ired() {
    // Tarjan SCC over the node graph; DownFin nodes may not sit on cycles.
    int n = static_cast<int>(p.nodes.size());
    std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
    std::vector<char> on_stack(static_cast<size_t>(n), 0);
    std::vector<int> stack;
    std::vector<int> scc_of(static_cast<size_t>(n), -1);
    std::vector<int> scc_size;
    std::vector<char> scc_cycle;
    int counter = 0;

    auto successors = [&](int v) {
      std::vector<int> out;
      const ProofNode& node = p.nodes[static_cast<size_t>(v)];
      for (const PremiseItem& item : node.premise)
        if (!item.step && node_in_range(item.node)) out.push_back(item.node);
      for (int e : node.edges)
        if (node_in_range(e)) out.push_back(e);
      return out;
    };

    std::function<void(int)> strongconnect = [&](int v) {
      index[static_cast<size_t>(v)] = low[static_cast<size_t>(v)] = counter++;
      stack.push_back(v);
      on_stack[static_cast<size_t>(v)] = 1;
      for (int w : successors(v)) {
        if (index[static_cast<size_t>(w)] < 0) {
          strongconnect(w);
          low[static_cast<size_t>(v)] = std::min(low[static_cast<size_t>(v)], low[static_cast<size_t>(w)]);
        } else if (on_stack[static_cast<size_t>(w)]) {
          low[static_cast<size_t>(v)] = std::min(low[static_cast<size_t>(v)], index[static_cast<size_t>(w)]);
        }
      }
      if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
        int id = static_cast<int>(scc_size.size());
        int size = 0;
        for (;;) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<size_t>(w)] = 0;
          scc_of[static_cast<size_t>(w)] = id;
          ++size;
          if (w == v) break;
        }
        scc_size.push_back(size);
        scc_cycle.push_back(0);
      }
    };
    for (int v = 0; v < n; ++v)
      if (index[static_cast<size_t>(v)] < 0) strongconnect(v);
    for (int v = 0; v < n; ++v)
      for (int w : successors(v))
        if (scc_of[static_cast<size_t>(v)] == scc_of[static_cast<size_t>(w)] &&
            (scc_size[static_cast<size_t>(scc_of[static_cast<size_t>(v)])] > 1 || v == w))
          scc_cycle[static_cast<size_t>(scc_of[static_cast<size_t>(v)])] = 1;
    for (int v = 0; v < n; ++v)
      if (p.nodes[static_cast<size_t>(v)].judgment == Judgment::DownFin &&
          scc_cycle[static_cast<size_t>(scc_of[static_cast<size_t>(v)])])
        violation(v, "MarkedLiftOnCycle", "marked lift lies on a cycle");
  }

  void run() {
    if (!node_in_range(p.root)) {
      violation(-1, "DanglingEdge", "root index out of range");
      return;
    }
    if (p.nodes[static_cast<size_t>(p.root)].judgment != Judgment::Rel)
      violation(p.root, "BadJudgment", "root must be a relation goal");
    for (int i = 0; i < static_cast<int>(p.nodes.size()); ++i) {
      const ProofNode& node = p.nodes[static_cast<size_t>(i)];
      if (node.judgment == Judgment::DownFin && p.kind != RelationKind::IRED)
        violation(i, "BadJudgment", "marked lift outside an ired proof");
      switch (node.rule) {
        case ProofNode::RuleKind::Split:
          if (node.judgment != Judgment::Rel)
            violation(i, "BadJudgment", "split justifies relation goals only");
          else
            check_split(i);
          break;
        case ProofNode::RuleKind::Lift:
          if (node.judgment == Judgment::Rel)
            violation(i, "BadJudgment", "lift justifies below-root judgments only");
          else
            check_lift(i);
          break;
        case ProofNode::RuleKind::Id:
          if (node.judgment == Judgment::Rel)
            violation(i, "BadJudgment", "id justifies below-root judgments only");
          else if (!bisimilar(minimize(node.lhs), minimize(node.rhs)))
            violation(i, "IdNotBisimilar", "id goals must be bisimilar");
          break;
      }
    }
    if (p.kind == RelationKind::IRED) check_global_ired();
  }
};

}  // namespace

ValidationReport validate(const ProofGraph& p, const Trs& trs) {
  Checker checker{p, trs, {}};
  checker.run();
  return checker.report;
}

void extract_into(const ProofGraph& p, const Trs& trs, int rel_node, int depth,
                  const Position& prefix, RationalTerm& current, std::vector<Step>& steps) {
  if (depth <= 0) return;
  const ProofNode& node = p.nodes[static_cast<size_t>(rel_node)];
  // Pattern depth still needed after each item, to prepare later redexes.
  std::vector<int> after(node.premise.size() + 1, 0);
  for (int k = static_cast<int>(node.premise.size()) - 1; k >= 0; --k) {
    after[static_cast<size_t>(k)] = after[static_cast<size_t>(k) + 1];
    if (node.premise[static_cast<size_t>(k)].step)
      after[static_cast<size_t>(k)] = std::max(
          after[static_cast<size_t>(k)],
          trs.rules[static_cast<size_t>(node.premise[static_cast<size_t>(k)].step->rule)]
              .lhs_pattern_depth);
  }
  for (size_t k = 0; k < node.premise.size(); ++k) {
    const PremiseItem& item = node.premise[k];
    if (item.step) {
      RationalTerm sub = subterm_at(current, prefix);
      auto sigma = match_root(trs.rules[static_cast<size_t>(item.step->rule)].lhs, sub);
      if (!sigma)
        fail("ExtractionStuck", "redex at " + print_position(prefix) +
                                    " cannot be prepared by finite approximation");
      current = step_at(current, prefix, item.step->rule, trs);
      steps.push_back({prefix, item.step->rule, *sigma});
    } else {
      const ProofNode& down = p.nodes[static_cast<size_t>(item.node)];
      if (down.rule == ProofNode::RuleKind::Id) continue;
      int child_depth = std::max(depth - 1, after[k + 1] - 1);
      for (size_t i = 0; i < down.edges.size(); ++i) {
        Position child_pos = prefix;
        child_pos.push_back(static_cast<int>(i) + 1);
        extract_into(p, trs, down.edges[i], child_depth, child_pos, current, steps);
      }
    }
  }
}

FiniteReduction extract_prefix(const ProofGraph& p, const Trs& trs, int n) {
  if (p.kind != RelationKind::IRED)
    fail("InvalidCertificate", "prefix extraction requires an ired certificate");
  ValidationReport report = validate(p, trs);
  if (!report.ok)
    fail("InvalidCertificate", report.violations.empty() ? "invalid certificate"
                                                         : report.violations[0].message);
  RationalTerm current = minimize(p.nodes[static_cast<size_t>(p.root)].lhs);
  std::vector<Step> steps;
  extract_into(p, trs, p.root, n, {}, current, steps);
  return FiniteReduction{minimize(p.nodes[static_cast<size_t>(p.root)].lhs), std::move(steps)};
}

std::string export_dot(const ProofGraph& p) {
  std::ostringstream os;
  os << "digraph proof {\n";
  os << "  label=\"" << kind_name(p.kind) << "\";\n";
  os << "  node [shape=box, fontname=\"monospace\"];\n";
  for (size_t i = 0; i < p.nodes.size(); ++i) {
    const ProofNode& node = p.nodes[i];
    std::string judgment = node.judgment == Judgment::Rel      ? "rel"
                           : node.judgment == Judgment::Down   ? "down"
                                                               : "down*";
    std::string rule = node.rule == ProofNode::RuleKind::Split  ? "split"
                       : node.rule == ProofNode::RuleKind::Lift ? "lift"
                                                                : "id";
    os << "  n" << i << " [label=\"" << i << " [" << judgment << "/" << rule << "]\\n"
       << print_term(minimize(node.lhs)) << "\\n" << print_term(minimize(node.rhs)) << "\"";
    if (node.judgment == Judgment::DownFin) os << ", style=dashed, peripheries=2";
    if (static_cast<int>(i) == p.root) os << ", penwidth=2";
    os << "];\n";
    int item_index = 0;
    for (const PremiseItem& item : node.premise) {
      if (!item.step)
        os << "  n" << i << " -> n" << item.node << " [label=\"p" << item_index << "\"];\n";
      ++item_index;
    }
    for (size_t e = 0; e < node.edges.size(); ++e)
      os << "  n" << i << " -> n" << node.edges[e] << " [label=\"arg" << (e + 1)
         << "\", style=dotted];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace infinir
