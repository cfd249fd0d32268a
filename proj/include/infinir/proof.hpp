#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infinir/trs.hpp"

namespace infinir {

enum class RelationKind { IEQ, BI, IRED };

std::string kind_name(RelationKind k);
RelationKind kind_from_name(const std::string& name);

enum class Judgment { Rel, Down, DownFin };
enum class StepDir { Fwd, Bwd };

struct RootStepItem {
  int rule = 0;
  StepDir dir = StepDir::Fwd;
  Substitution sigma;
};

/// One element of a split premise: a generator root step or an edge to a
/// Down/DownFin node.
struct PremiseItem {
  std::optional<RootStepItem> step;
  int node = -1;  // valid when !step
};

struct ProofNode {
  Judgment judgment = Judgment::Rel;
  RationalTerm lhs, rhs;  // the goal pair
  enum class RuleKind { Split, Lift, Id } rule = RuleKind::Id;
  std::vector<PremiseItem> premise;  // Split
  std::vector<int> edges;            // Lift: one Rel node per argument
};

/// A finite cyclic certificate whose unfolding is a non-well-founded proof
/// tree. For IRED certificates no cycle may pass through a DownFin node.
struct ProofGraph {
  RelationKind kind = RelationKind::IRED;
  std::vector<ProofNode> nodes;
  int root = 0;
};

struct Violation {
  int node = -1;
  std::string code;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Independent certificate checker: local rule instances plus the global
/// marked-lift cycle condition for IRED (SCC analysis).
ValidationReport validate(const ProofGraph& p, const Trs& trs);

/// Unfolds a valid IRED certificate into a finite reduction whose final term
/// agrees with the goal's target up to truncation depth n.
FiniteReduction extract_prefix(const ProofGraph& p, const Trs& trs, int n);

/// Replays the subtree below a Rel node into `current` at `prefix`, unfolding
/// lifts to the given depth. Building block of extract_prefix and compress;
/// assumes the certificate already validated.
void extract_into(const ProofGraph& p, const Trs& trs, int rel_node, int depth,
                  const Position& prefix, RationalTerm& current, std::vector<Step>& steps);

/// Serialization (schema in docs/formats.md).
std::string proof_to_json(const ProofGraph& p);
ProofGraph proof_from_json(const std::string& text, const Signature& sig);

/// DOT rendering with judgment-labeled nodes; marked lifts drawn dashed.
std::string export_dot(const ProofGraph& p);

}  // namespace infinir
