#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace infinir {

/// Error with a stable machine-readable code, e.g. "ArityMismatch".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] void fail(const std::string& code, const std::string& message);

/// Reserved nullary cut marker used by truncation; not admissible in signatures.
inline const std::string kCutMarker = "#";

class Signature {
 public:
  void add(const std::string& name, int arity);
  bool contains(const std::string& name) const;
  /// Arity of a declared symbol, or nullopt.
  std::optional<int> arity(const std::string& name) const;
  const std::map<std::string, int>& symbols() const { return arities_; }

 private:
  std::map<std::string, int> arities_;
};

/// A node of a rooted finite term graph. Variable nodes have no children.
struct TermNode {
  std::string label;
  bool is_var = false;
  std::vector<int> children;

  bool operator==(const TermNode&) const = default;
};

/// A rooted finite term graph denoting a finite or infinite (rational) term.
/// Equality of the denoted terms is bisimilarity; functions below that return
/// RationalTerm always return the canonical (minimized, BFS-ordered) graph, so
/// that structural equality of canonical graphs coincides with bisimilarity.
struct RationalTerm {
  std::vector<TermNode> nodes;
  int root = 0;

  const TermNode& node(int i) const { return nodes[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(nodes.size()); }
  bool operator==(const RationalTerm&) const = default;
};

/// 1-based child indices from the root.
using Position = std::vector<int>;

/// A well-founded term over the signature, variables and the cut marker `#`.
struct FiniteTerm {
  std::string label;
  bool is_var = false;
  std::vector<FiniteTerm> children;

  bool operator==(const FiniteTerm&) const = default;
};

using Substitution = std::map<std::string, RationalTerm>;

/// Either zero or 2^-exponent; exact, never floating point.
struct DyadicDistance {
  bool is_zero = true;
  int exponent = 0;

  static DyadicDistance zero() { return {true, 0}; }
  static DyadicDistance exp(int n) { return {false, n}; }
  bool operator==(const DyadicDistance&) const = default;
};

/// Value order: Zero < 2^-n < 2^-m whenever n > m.
bool operator<(const DyadicDistance& a, const DyadicDistance& b);
DyadicDistance max_distance(const DyadicDistance& a, const DyadicDistance& b);

/// Abstract term expression: the input language of make_term and the parser.
struct TermExpr {
  enum class Kind { App, Name, Rec };
  Kind kind = Kind::Name;
  std::string head;            // App: symbol; Name: identifier; Rec: bound name
  std::vector<TermExpr> args;  // App: arguments; Rec: {bound expr, body}

  static TermExpr name(std::string n) { return {Kind::Name, std::move(n), {}}; }
  static TermExpr app(std::string h, std::vector<TermExpr> a) {
    return {Kind::App, std::move(h), std::move(a)};
  }
  static TermExpr rec(std::string n, TermExpr bound, TermExpr body) {
    return {Kind::Rec, std::move(n), {std::move(bound), std::move(body)}};
  }
};

/// Solves a guarded system of recursive equations; returns the canonical graph.
/// Every binding name is visible in all bindings and in the root expression.
RationalTerm make_term(const Signature& sig,
                       const std::vector<std::pair<std::string, TermExpr>>& bindings,
                       const TermExpr& root);

/// Canonical form: minimal graph bisimilar to the input, nodes numbered in BFS
/// order from the root with children visited left to right.
RationalTerm minimize(const RationalTerm& t);

bool bisimilar(const RationalTerm& s, const RationalTerm& t);

/// Zero iff bisimilar; otherwise 2^-n with n the first level of the unfolded
/// trees where a difference appears.
DyadicDistance distance(const RationalTerm& s, const RationalTerm& t);

/// Tree unfolding with every subterm at depth exactly n replaced by `#`.
FiniteTerm truncate(const RationalTerm& t, int depth);

/// Subterm graph at position p, canonicalized. Throws InvalidPosition.
RationalTerm subterm_at(const RationalTerm& t, const Position& p);

std::set<std::string> variables_of(const RationalTerm& t);

/// Applies sigma by corecursion: variable nodes are redirected to the bound
/// graphs. Unmapped variables stay. Result canonical.
RationalTerm substitute(const RationalTerm& t, const Substitution& sigma);

/// True iff the graph is acyclic, i.e. denotes a finite term.
bool is_finite(const RationalTerm& t);

/// Height of a finite term: constants/variables have height 1.
int finite_height(const RationalTerm& t);

FiniteTerm to_finite(const RationalTerm& t);  // requires is_finite
RationalTerm from_finite(const FiniteTerm& t, const Signature& sig);

/// All positions of the unfolding with length <= max_depth, in lexicographic
/// (DFS, shorter-prefix-first) order.
std::vector<Position> positions_up_to(const RationalTerm& t, int max_depth);

/// Expression syntax printer; cyclic graphs are rendered with `rec` binders.
std::string print_term(const RationalTerm& t);
std::string print_term(const FiniteTerm& t);
std::string print_position(const Position& p);

/// Deterministic encoding of a canonical graph, usable as a map key.
std::string term_key(const RationalTerm& t);

/// Nodes of t whose rooted subterm is bisimilar to s (one refinement pass).
std::vector<int> nodes_bisimilar_to(const RationalTerm& t, const RationalTerm& s);

}  // namespace infinir
