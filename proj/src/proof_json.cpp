#include <json.hpp>

#include "infinir/parser.hpp"
#include "infinir/proof.hpp"

namespace infinir {

namespace {

using nlohmann::json;

/// Shared table of canonical terms, serialized as term expressions.
struct TermTable {
  std::vector<RationalTerm> terms;
  std::map<std::string, int> index;

  int put(const RationalTerm& t) {
    RationalTerm canonical = minimize(t);
    std::string key = term_key(canonical);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int idx = static_cast<int>(terms.size());
    index.emplace(std::move(key), idx);
    terms.push_back(std::move(canonical));
    return idx;
  }

  json to_json() const {
    json out = json::array();
    for (const RationalTerm& t : terms) out.push_back(print_term(t));
    return out;
  }
};

json sigma_to_json(const Substitution& sigma, TermTable& table) {
  json out = json::object();
  for (const auto& [var, term] : sigma) out[var] = table.put(term);
  return out;
}

std::string judgment_name(Judgment j) {
  switch (j) {
    case Judgment::Rel: return "rel";
    case Judgment::Down: return "down";
    case Judgment::DownFin: return "downfin";
  }
  return "?";
}

Judgment judgment_from(const std::string& name) {
  if (name == "rel") return Judgment::Rel;
  if (name == "down") return Judgment::Down;
  if (name == "downfin") return Judgment::DownFin;
  fail("BadCertificate", "unknown judgment " + name);
}

std::string rule_name(ProofNode::RuleKind r) {
  switch (r) {
    case ProofNode::RuleKind::Split: return "split";
    case ProofNode::RuleKind::Lift: return "lift";
    case ProofNode::RuleKind::Id: return "id";
  }
  return "?";
}

ProofNode::RuleKind rule_from(const std::string& name) {
  if (name == "split") return ProofNode::RuleKind::Split;
  if (name == "lift") return ProofNode::RuleKind::Lift;
  if (name == "id") return ProofNode::RuleKind::Id;
  fail("BadCertificate", "unknown rule " + name);
}

}  // namespace

std::string proof_to_json(const ProofGraph& p) {
  TermTable table;
  json nodes = json::array();
  for (const ProofNode& node : p.nodes) {
    json n;
    n["judgment"] = judgment_name(node.judgment);
    n["goal"] = {table.put(node.lhs), table.put(node.rhs)};
    n["rule"] = rule_name(node.rule);
    if (node.rule == ProofNode::RuleKind::Split) {
      json premise = json::array();
      for (const PremiseItem& item : node.premise) {
        if (item.step) {
          json step;
          step["rule_index"] = item.step->rule;
          step["direction"] = item.step->dir == StepDir::Fwd ? "fwd" : "bwd";
          step["sigma"] = sigma_to_json(item.step->sigma, table);
          premise.push_back(json{{"step", step}});
        } else {
          premise.push_back(json{{"node", item.node}});
        }
      }
      n["premise"] = premise;
    }
    if (node.rule == ProofNode::RuleKind::Lift) n["edges"] = node.edges;
    nodes.push_back(std::move(n));
  }
  json doc;
  doc["format"] = "infinir-proof";
  doc["version"] = 1;
  doc["kind"] = kind_name(p.kind);
  doc["terms"] = table.to_json();
  doc["root"] = p.root;
  doc["nodes"] = nodes;
  return doc.dump(2) + "\n";
}

namespace {

Substitution sigma_from_json(const json& j, const std::vector<RationalTerm>& terms) {
  Substitution sigma;
  for (auto it = j.begin(); it != j.end(); ++it) {
    int idx = it.value().get<int>();
    if (idx < 0 || idx >= static_cast<int>(terms.size()))
      fail("BadCertificate", "sigma term index out of range");
    sigma[it.key()] = terms[static_cast<size_t>(idx)];
  }
  return sigma;
}

}  // namespace

ProofGraph proof_from_json(const std::string& text, const Signature& sig) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail("BadCertificate", "not valid JSON");
  if (doc.value("format", "") != "infinir-proof")
    fail("BadCertificate", "unexpected document format");
  ProofGraph p;
  p.kind = kind_from_name(doc.at("kind").get<std::string>());
  std::vector<RationalTerm> terms;
  for (const json& t : doc.at("terms")) terms.push_back(parse_term(t.get<std::string>(), sig));
  auto term_at = [&](const json& j) -> const RationalTerm& {
    int idx = j.get<int>();
    if (idx < 0 || idx >= static_cast<int>(terms.size()))
      fail("BadCertificate", "term index out of range");
    return terms[static_cast<size_t>(idx)];
  };
  for (const json& n : doc.at("nodes")) {
    ProofNode node;
    node.judgment = judgment_from(n.at("judgment").get<std::string>());
    node.lhs = term_at(n.at("goal").at(0));
    node.rhs = term_at(n.at("goal").at(1));
    node.rule = rule_from(n.at("rule").get<std::string>());
    if (node.rule == ProofNode::RuleKind::Split) {
      for (const json& item : n.value("premise", json::array())) {
        PremiseItem pi;
        if (item.contains("step")) {
          const json& s = item.at("step");
          RootStepItem step;
          step.rule = s.at("rule_index").get<int>();
          std::string dir = s.at("direction").get<std::string>();
          if (dir != "fwd" && dir != "bwd") fail("BadCertificate", "bad step direction");
          step.dir = dir == "fwd" ? StepDir::Fwd : StepDir::Bwd;
          step.sigma = sigma_from_json(s.at("sigma"), terms);
          pi.step = std::move(step);
        } else {
          pi.node = item.at("node").get<int>();
        }
        node.premise.push_back(std::move(pi));
      }
    }
    if (node.rule == ProofNode::RuleKind::Lift)
      node.edges = n.value("edges", std::vector<int>{});
    p.nodes.push_back(std::move(node));
  }
  p.root = doc.at("root").get<int>();
  return p;
}

}  // namespace infinir
