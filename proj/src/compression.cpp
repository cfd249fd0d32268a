#include "infinir/compression.hpp"

#include <json.hpp>

#include <algorithm>
#include <climits>

#include "infinir/parser.hpp"

namespace infinir {

namespace {

struct Compressor {
  const ProofGraph& p;
  const Trs& trs;
  OredCertificate out;
  std::map<int, int> memo;  // rel node -> ored node

  int build(int rel_idx) {
    auto it = memo.find(rel_idx);
    if (it != memo.end()) return it->second;
    int idx = static_cast<int>(out.nodes.size());
    out.nodes.emplace_back();
    memo.emplace(rel_idx, idx);

    const ProofNode& node = p.nodes[static_cast<size_t>(rel_idx)];
    RationalTerm start = minimize(node.lhs);
    RationalTerm current = start;
    std::vector<Step> steps;
    std::vector<int> children;

    for (size_t k = 0; k < node.premise.size(); ++k) {
      const PremiseItem& item = node.premise[k];
      bool final_item = (k + 1 == node.premise.size());
      if (item.step) {
        current = step_at(current, {}, item.step->rule, trs);
        steps.push_back({{}, item.step->rule, item.step->sigma});
        continue;
      }
      const ProofNode& down = p.nodes[static_cast<size_t>(item.node)];
      RationalTerm lift_source = minimize(down.lhs);
      RationalTerm lift_target = minimize(down.rhs);
      if (!final_item) {
        // Marked lift: replay the nested reductions far enough to reach the
        // stated target exactly; finite targets make this possible.
        if (down.rule == ProofNode::RuleKind::Id) continue;
        if (!is_finite(lift_target))
          fail("CompressionFailed",
               "marked lift targets the infinite term " + print_term(lift_target));
        for (size_t i = 0; i < down.edges.size(); ++i) {
          Position pos{static_cast<int>(i) + 1};
          RationalTerm arg_target = subterm_at(lift_target, pos);
          extract_into(p, trs, down.edges[i], finite_height(arg_target), pos, current, steps);
        }
        if (!(current == lift_target))
          fail("CompressionFailed", "replay reached " + print_term(current) + " instead of " +
                                        print_term(lift_target));
        continue;
      }
      // Final lift: descend into the arguments.
      if (down.rule == ProofNode::RuleKind::Id) {
        const TermNode& root = current.node(current.root);
        children.assign(root.children.size(), OredNode::kStop);
        continue;
      }
      if (!(current == lift_source))
        fail("CompressionFailed", "replay reached " + print_term(current) +
                                      " but the final descent starts at " +
                                      print_term(lift_source));
      for (size_t i = 0; i < down.edges.size(); ++i) {
        Position pos{static_cast<int>(i) + 1};
        if (bisimilar(subterm_at(lift_source, pos), subterm_at(lift_target, pos))) {
          children.push_back(OredNode::kStop);
        } else {
          children.push_back(build(down.edges[i]));
        }
      }
    }
    out.nodes[static_cast<size_t>(idx)].head = FiniteReduction{start, std::move(steps)};
    out.nodes[static_cast<size_t>(idx)].children = std::move(children);
    return idx;
  }
};

}  // namespace

OredCertificate compress(const ProofGraph& p, const Trs& trs) {
  if (p.kind != RelationKind::IRED)
    fail("InvalidCertificate", "compression applies to ired certificates");
  ValidationReport report = validate(p, trs);
  if (!report.ok)
    fail("InvalidCertificate", report.violations.empty() ? "invalid certificate"
                                                         : report.violations[0].message);
  if (!is_left_linear(trs))
    fail("NotLeftLinear", "compression requires a left-linear system");
  Compressor compressor{p, trs, {}, {}};
  compressor.out.source = minimize(p.nodes[static_cast<size_t>(p.root)].lhs);
  compressor.out.target = minimize(p.nodes[static_cast<size_t>(p.root)].rhs);
  compressor.out.root = compressor.build(p.root);
  return std::move(compressor.out);
}

namespace {

struct Emission {
  StepStream stream;
  std::vector<int> level_end;  // stream index after each completed level
};

Emission emit_core(const OredCertificate& o, int max_steps, int max_level) {
  Emission em;
  em.stream.start = o.source;
  struct Entry {
    int node;
    Position address;
  };
  std::vector<Entry> layer{{o.root, {}}};
  std::vector<int> previous_nodes;
  for (int level = 0; level <= max_level && !layer.empty(); ++level) {
    bool emitted = false;
    std::vector<Entry> next;
    for (const Entry& entry : layer) {
      const OredNode& node = o.nodes[static_cast<size_t>(entry.node)];
      for (const Step& step : node.head.steps) {
        if (static_cast<int>(em.stream.steps.size()) >= max_steps) {
          em.level_end.push_back(static_cast<int>(em.stream.steps.size()));
          return em;
        }
        Position absolute = entry.address;
        absolute.insert(absolute.end(), step.pos.begin(), step.pos.end());
        em.stream.steps.push_back({std::move(absolute), step.rule, step.sigma});
        em.stream.level.push_back(level);
        emitted = true;
      }
      for (size_t i = 0; i < node.children.size(); ++i) {
        if (node.children[i] == OredNode::kStop) continue;
        Position address = entry.address;
        address.push_back(static_cast<int>(i) + 1);
        next.push_back({node.children[i], std::move(address)});
      }
    }
    em.level_end.push_back(static_cast<int>(em.stream.steps.size()));
    std::vector<int> nodes;
    for (const Entry& e : next) nodes.push_back(e.node);
    std::sort(nodes.begin(), nodes.end());
    if (!emitted && nodes == previous_nodes) break;  // cycle of empty heads
    previous_nodes = std::move(nodes);
    layer = std::move(next);
  }
  return em;
}

}  // namespace

StepStream emit_steps(const OredCertificate& o, int k) {
  if (k < 0) fail("InvalidBudget", "step count must be nonnegative");
  return emit_core(o, k, INT_MAX).stream;
}

ValidationReport validate_ored(const OredCertificate& o, const Trs& trs, int depth) {
  ValidationReport report;
  auto violation = [&](int node, std::string code, std::string message) {
    report.ok = false;
    report.violations.push_back({node, std::move(code), std::move(message)});
  };

  for (size_t i = 0; i < o.nodes.size(); ++i) {
    const OredNode& node = o.nodes[i];
    RationalTerm end = minimize(node.head.start);
    bool replay_ok = true;
    for (const Step& step : node.head.steps) {
      try {
        end = step_at(end, step.pos, step.rule, trs);
      } catch (const Error& e) {
        violation(static_cast<int>(i), "BadStep", e.what());
        replay_ok = false;
        break;
      }
    }
    if (!replay_ok) continue;
    const TermNode& root = end.node(end.root);
    if (node.children.size() != root.children.size()) {
      violation(static_cast<int>(i), "ArityMismatch",
                "node ends in " + print_term(end) + " with " +
                    std::to_string(root.children.size()) + " arguments but has " +
                    std::to_string(node.children.size()) + " children");
      continue;
    }
    for (size_t c = 0; c < node.children.size(); ++c) {
      int child = node.children[c];
      if (child == OredNode::kStop) continue;
      if (child < 0 || child >= static_cast<int>(o.nodes.size())) {
        violation(static_cast<int>(i), "DanglingEdge", "child index out of range");
        continue;
      }
      Position pos{static_cast<int>(c) + 1};
      if (!bisimilar(minimize(o.nodes[static_cast<size_t>(child)].head.start),
                     subterm_at(end, pos)))
        violation(static_cast<int>(i), "ChainMismatch",
                  "child " + std::to_string(c + 1) + " does not start at the argument");
    }
  }
  if (!report.ok) return report;

  // Depth-bounded replay of the canonical interleaving against the target.
  Emission em = emit_core(o, INT_MAX, depth);
  RationalTerm target = minimize(o.target);
  RationalTerm current = minimize(o.source);
  size_t step_idx = 0;
  size_t levels = em.level_end.size();
  for (size_t level = 0; level < levels && static_cast<int>(level) <= depth; ++level) {
    for (; step_idx < static_cast<size_t>(em.level_end[level]); ++step_idx) {
      const Step& step = em.stream.steps[step_idx];
      try {
        current = step_at(current, step.pos, step.rule, trs);
      } catch (const Error& e) {
        violation(-1, "BadStep", std::string("interleaved replay: ") + e.what());
        return report;
      }
    }
    if (!(truncate(current, static_cast<int>(level)) == truncate(target, static_cast<int>(level))))
      violation(-1, "TruncationMismatch",
                "after level " + std::to_string(level) + " heads, replay disagrees with " +
                    print_term(o.target));
  }
  // A stream that ends before the depth bound has reached its final term; it
  // must agree with the target at the full depth.
  if (static_cast<int>(levels) <= depth && !(truncate(current, depth) == truncate(target, depth)))
    violation(-1, "TruncationMismatch",
              "finished reduction ends at " + print_term(current) + ", not " +
                  print_term(o.target));
  return report;
}

namespace {

using nlohmann::json;

}  // namespace

std::string ored_to_json(const OredCertificate& o) {
  std::vector<RationalTerm> terms;
  std::map<std::string, int> index;
  auto put = [&](const RationalTerm& t) {
    RationalTerm canonical = minimize(t);
    std::string key = term_key(canonical);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int idx = static_cast<int>(terms.size());
    index.emplace(std::move(key), idx);
    terms.push_back(std::move(canonical));
    return idx;
  };

  json nodes = json::array();
  for (const OredNode& node : o.nodes) {
    json head = json::array();
    for (const Step& step : node.head.steps) {
      json s;
      s["position"] = step.pos;
      s["rule_index"] = step.rule;
      json sigma = json::object();
      for (const auto& [var, term] : step.sigma) sigma[var] = put(term);
      s["sigma"] = sigma;
      head.push_back(std::move(s));
    }
    json children = json::array();
    for (int c : node.children) {
      if (c == OredNode::kStop)
        children.push_back("stop");
      else
        children.push_back(c);
    }
    nodes.push_back(json{{"start", put(node.head.start)},
                         {"head", std::move(head)},
                         {"children", std::move(children)}});
  }
  json doc;
  doc["format"] = "infinir-ored";
  doc["version"] = 1;
  doc["source"] = put(o.source);
  doc["target"] = put(o.target);
  doc["root"] = o.root;
  doc["nodes"] = std::move(nodes);
  json table = json::array();
  for (const RationalTerm& t : terms) table.push_back(print_term(t));
  doc["terms"] = std::move(table);
  return doc.dump(2) + "\n";
}

OredCertificate ored_from_json(const std::string& text, const Signature& sig) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail("BadCertificate", "not valid JSON");
  if (doc.value("format", "") != "infinir-ored")
    fail("BadCertificate", "unexpected document format");
  std::vector<RationalTerm> terms;
  for (const json& t : doc.at("terms")) terms.push_back(parse_term(t.get<std::string>(), sig));
  auto term_at = [&](const json& j) -> const RationalTerm& {
    int idx = j.get<int>();
    if (idx < 0 || idx >= static_cast<int>(terms.size()))
      fail("BadCertificate", "term index out of range");
    return terms[static_cast<size_t>(idx)];
  };
  OredCertificate o;
  o.source = term_at(doc.at("source"));
  o.target = term_at(doc.at("target"));
  o.root = doc.at("root").get<int>();
  for (const json& n : doc.at("nodes")) {
    OredNode node;
    node.head.start = term_at(n.at("start"));
    for (const json& s : n.at("head")) {
      Step step;
      step.pos = s.at("position").get<std::vector<int>>();
      step.rule = s.at("rule_index").get<int>();
      for (auto it = s.at("sigma").begin(); it != s.at("sigma").end(); ++it)
        step.sigma[it.key()] = term_at(it.value());
      node.head.steps.push_back(std::move(step));
    }
    for (const json& c : n.at("children")) {
      if (c.is_string() && c.get<std::string>() == "stop")
        node.children.push_back(OredNode::kStop);
      else
        node.children.push_back(c.get<int>());
    }
    o.nodes.push_back(std::move(node));
  }
  return o;
}

}  // namespace infinir
