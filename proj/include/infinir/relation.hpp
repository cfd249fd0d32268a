#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infinir/proof.hpp"
#include "infinir/trs.hpp"

namespace infinir {

/// Relation on universe indices, stored as a dense boolean matrix.
struct PairRelation {
  int n = 0;
  std::vector<char> bits;

  PairRelation() = default;
  explicit PairRelation(int size) : n(size), bits(static_cast<size_t>(size) * size, 0) {}
  bool contains(int i, int j) const { return bits[static_cast<size_t>(i) * n + j] != 0; }
  void insert(int i, int j) { bits[static_cast<size_t>(i) * n + j] = 1; }
  void erase(int i, int j) { bits[static_cast<size_t>(i) * n + j] = 0; }
  int count() const;
  bool operator==(const PairRelation&) const = default;

  static PairRelation full(int size);
  static PairRelation identity(int size);
};

bool subset(const PairRelation& a, const PairRelation& b);
PairRelation transpose(const PairRelation& r);
PairRelation union_relation(const PairRelation& a, const PairRelation& b);
PairRelation reflexive_transitive_closure(const PairRelation& edges);

struct UniverseEdge {
  int from = 0;
  int to = 0;
  int rule = 0;
  Substitution sigma;
};

/// A finite set of canonical terms closed (when `closed`) under root-step
/// targets, enumerable root-step preimages, root-children and relevant
/// lhs instances. The carrier on which the fixed points are computed exactly.
struct Universe {
  RelationKind kind = RelationKind::BI;
  std::vector<RationalTerm> terms;
  bool closed = false;
  std::vector<std::vector<int>> child_index;  // -1 when a child is absent
  std::vector<UniverseEdge> edges;            // forward root steps within the set
  std::map<std::string, int> index;           // term_key -> position

  int size() const { return static_cast<int>(terms.size()); }
  int index_of(const RationalTerm& canonical) const;
};

/// Computes edges and child indices for a given term set; `closed` is the
/// conjunction of `saturated`, local closure checks and the invertibility veto.
Universe build_universe(std::vector<RationalTerm> terms, const Trs& trs, RelationKind kind,
                        bool saturated);

/// Least closure of the seeds within the node budget; closed=false when the
/// budget is exhausted or closure cannot be certified.
Universe close_universe(const std::vector<RationalTerm>& seeds, const Trs& trs,
                        RelationKind kind, int node_budget);

/// Def-2 lifting on the universe: same-symbol pairs with related arguments,
/// union the identity.
PairRelation lift(const PairRelation& r, const Universe& u);

/// Greatest fixed point of R -> (gen ∪ lift(R))* for IEQ (generator taken
/// symmetrically) or BI. Requires a closed universe.
PairRelation decide_nu(const Universe& u, RelationKind kind, const Trs& trs);

/// The mu-nu fixed point for infinitary rewriting. Requires a closed universe.
PairRelation decide_ired(const Universe& u, const Trs& trs);

/// decide_nu with an explicit generator edge set (used for closure-feedback
/// checks); the generator is used exactly as given.
PairRelation decide_nu_generated(const Universe& u, const PairRelation& generator);

/// One outer round of the mu-nu solver: the inner greatest fixed point with
/// the given outer relation under the lifting. decide_ired's result is the
/// least `outer` with ired_round(u, trs, outer) == outer.
PairRelation ired_round(const Universe& u, const Trs& trs, const PairRelation& outer);

struct SearchBudget {
  int max_goals = 10000;
  int max_split = 8;
  int max_new_term_nodes = 256;
};

/// Stage snapshots of a solver run, enough to rebuild certificates.
struct SolveTrace {
  RelationKind kind = RelationKind::BI;
  std::vector<PairRelation> stages;  // IRED: R_1..R_k; nu kinds: single stage
  PairRelation final;
  int max_split = 0;
};

/// Runs the appropriate solver on any (possibly partial) carrier. Sound: every
/// reported pair embeds into the true relation. max_split <= 0 means |u|.
SolveTrace solve_relation(const Universe& u, RelationKind kind, const Trs& trs, int max_split);

/// Rebuilds a cyclic certificate for a pair contained in the trace's final
/// relation, by shortest-chain replay of the fixed-point justification.
ProofGraph extract_certificate(const Universe& u, const Trs& trs, const SolveTrace& trace,
                               int from, int to);

struct Verdict {
  enum class Kind { Proved, Refuted, Unknown } kind = Kind::Unknown;
  std::optional<ProofGraph> certificate;
};

/// Sound, incomplete proof search over a bounded candidate pool. Never refutes.
Verdict search_proof(const RationalTerm& s, const RationalTerm& t, RelationKind kind,
                     const Trs& trs, const SearchBudget& budget);

}  // namespace infinir
