#include "infinir/term.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace infinir {

void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

void Signature::add(const std::string& name, int arity) {
  if (name == kCutMarker) fail("ReservedSymbol", "'#' is reserved for truncation");
  if (arity < 0) fail("ArityMismatch", "negative arity for " + name);
  auto it = arities_.find(name);
  if (it != arities_.end() && it->second != arity)
    fail("ArityMismatch", name + " declared with arity " + std::to_string(it->second) +
                              " and " + std::to_string(arity));
  arities_[name] = arity;
}

bool Signature::contains(const std::string& name) const {
  return arities_.count(name) != 0;
}

std::optional<int> Signature::arity(const std::string& name) const {
  auto it = arities_.find(name);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

bool operator<(const DyadicDistance& a, const DyadicDistance& b) {
  if (a.is_zero) return !b.is_zero;
  if (b.is_zero) return false;
  return a.exponent > b.exponent;
}

DyadicDistance max_distance(const DyadicDistance& a, const DyadicDistance& b) {
  return a < b ? b : a;
}

namespace {

std::vector<int> reachable_order(const RationalTerm& t) {
  std::vector<int> order;
  std::vector<char> seen(t.nodes.size(), 0);
  std::deque<int> queue{t.root};
  seen[static_cast<size_t>(t.root)] = 1;
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    order.push_back(i);
    for (int c : t.node(i).children) {
      if (!seen[static_cast<size_t>(c)]) {
        seen[static_cast<size_t>(c)] = 1;
        queue.push_back(c);
      }
    }
  }
  return order;
}

}  // namespace

namespace {

// Coarsest partition where equal classes mean bisimilar subgraphs.
std::vector<int> refine_classes(const std::vector<TermNode>& nodes) {
  int n = static_cast<int>(nodes.size());
  std::vector<int> cls(static_cast<size_t>(n));
  {
    std::map<std::pair<std::string, bool>, int> init;
    for (int i = 0; i < n; ++i) {
      auto key = std::make_pair(nodes[static_cast<size_t>(i)].label, nodes[static_cast<size_t>(i)].is_var);
      auto [it, fresh] = init.emplace(key, static_cast<int>(init.size()));
      (void)fresh;
      cls[static_cast<size_t>(i)] = it->second;
    }
  }
  for (;;) {
    std::map<std::vector<int>, int> table;
    std::vector<int> next(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<int> sig{cls[static_cast<size_t>(i)]};
      for (int c : nodes[static_cast<size_t>(i)].children) sig.push_back(cls[static_cast<size_t>(c)]);
      auto [it, fresh] = table.emplace(std::move(sig), static_cast<int>(table.size()));
      (void)fresh;
      next[static_cast<size_t>(i)] = it->second;
    }
    bool stable = true;
    std::map<int, int> witness;
    for (int i = 0; i < n && stable; ++i) {
      auto [it, fresh] = witness.emplace(cls[static_cast<size_t>(i)], next[static_cast<size_t>(i)]);
      if (!fresh && it->second != next[static_cast<size_t>(i)]) stable = false;
    }
    cls = std::move(next);
    if (stable) break;
  }
  return cls;
}

}  // namespace

RationalTerm minimize(const RationalTerm& t) {
  if (t.nodes.empty()) fail("EmptyTerm", "term graph has no nodes");
  // Compact to reachable nodes.
  std::vector<int> order = reachable_order(t);
  std::vector<int> remap(t.nodes.size(), -1);
  for (size_t i = 0; i < order.size(); ++i) remap[static_cast<size_t>(order[i])] = static_cast<int>(i);
  int n = static_cast<int>(order.size());
  std::vector<TermNode> nodes(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const TermNode& src = t.node(order[static_cast<size_t>(i)]);
    TermNode& dst = nodes[static_cast<size_t>(i)];
    dst.label = src.label;
    dst.is_var = src.is_var;
    dst.children.reserve(src.children.size());
    for (int c : src.children) dst.children.push_back(remap[static_cast<size_t>(c)]);
  }

  std::vector<int> cls = refine_classes(nodes);

  // Quotient, numbering classes in BFS order from the root class.
  std::vector<int> repr(static_cast<size_t>(n), -1);  // class -> representative node
  for (int i = n - 1; i >= 0; --i) repr[static_cast<size_t>(cls[static_cast<size_t>(i)])] = i;
  std::vector<int> classIndex(static_cast<size_t>(n), -1);
  std::vector<int> bfs{cls[static_cast<size_t>(0)]};
  classIndex[static_cast<size_t>(cls[static_cast<size_t>(0)])] = 0;
  for (size_t q = 0; q < bfs.size(); ++q) {
    int c = bfs[q];
    for (int ch : nodes[static_cast<size_t>(repr[static_cast<size_t>(c)])].children) {
      int cc = cls[static_cast<size_t>(ch)];
      if (classIndex[static_cast<size_t>(cc)] < 0) {
        classIndex[static_cast<size_t>(cc)] = static_cast<int>(bfs.size());
        bfs.push_back(cc);
      }
    }
  }
  RationalTerm out;
  out.root = 0;
  out.nodes.resize(bfs.size());
  for (size_t k = 0; k < bfs.size(); ++k) {
    const TermNode& src = nodes[static_cast<size_t>(repr[static_cast<size_t>(bfs[k])])];
    TermNode& dst = out.nodes[k];
    dst.label = src.label;
    dst.is_var = src.is_var;
    for (int c : src.children)
      dst.children.push_back(classIndex[static_cast<size_t>(cls[static_cast<size_t>(c)])]);
  }
  return out;
}

namespace {

// Least level of the product unfolding where the labels differ, if any.
std::optional<int> first_difference(const RationalTerm& s, const RationalTerm& t) {
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> layer{{s.root, t.root}};
  seen.insert({s.root, t.root});
  int level = 0;
  while (!layer.empty()) {
    std::vector<std::pair<int, int>> next;
    for (auto [i, j] : layer) {
      const TermNode& a = s.node(i);
      const TermNode& b = t.node(j);
      if (a.label != b.label || a.is_var != b.is_var ||
          a.children.size() != b.children.size())
        return level;
      for (size_t k = 0; k < a.children.size(); ++k) {
        auto pair = std::make_pair(a.children[k], b.children[k]);
        if (seen.insert(pair).second) next.push_back(pair);
      }
    }
    layer = std::move(next);
    ++level;
  }
  return std::nullopt;
}

}  // namespace

bool bisimilar(const RationalTerm& s, const RationalTerm& t) {
  return !first_difference(s, t).has_value();
}

DyadicDistance distance(const RationalTerm& s, const RationalTerm& t) {
  auto diff = first_difference(s, t);
  if (!diff) return DyadicDistance::zero();
  return DyadicDistance::exp(*diff);
}

namespace {

FiniteTerm truncate_node(const RationalTerm& t, int node, int remaining) {
  if (remaining <= 0) return FiniteTerm{kCutMarker, false, {}};
  const TermNode& n = t.node(node);
  FiniteTerm out{n.label, n.is_var, {}};
  out.children.reserve(n.children.size());
  for (int c : n.children) out.children.push_back(truncate_node(t, c, remaining - 1));
  return out;
}

}  // namespace

FiniteTerm truncate(const RationalTerm& t, int depth) {
  if (depth < 0) fail("InvalidDepth", "negative truncation depth");
  return truncate_node(t, t.root, depth);
}

RationalTerm subterm_at(const RationalTerm& t, const Position& p) {
  int cur = t.root;
  for (size_t k = 0; k < p.size(); ++k) {
    const TermNode& n = t.node(cur);
    int i = p[k];
    if (i < 1 || i > static_cast<int>(n.children.size()))
      fail("InvalidPosition", "position " + print_position(p) + " not in term");
    cur = n.children[static_cast<size_t>(i - 1)];
  }
  RationalTerm sub = t;
  sub.root = cur;
  return minimize(sub);
}

std::set<std::string> variables_of(const RationalTerm& t) {
  std::set<std::string> vars;
  for (int i : reachable_order(t))
    if (t.node(i).is_var) vars.insert(t.node(i).label);
  return vars;
}

RationalTerm substitute(const RationalTerm& t, const Substitution& sigma) {
  RationalTerm out;
  out.nodes = t.nodes;
  out.root = t.root;
  std::map<std::string, int> spliced;  // variable -> root of inserted graph
  // Only the original nodes are substituted: the substitution is simultaneous,
  // so variables inside spliced graphs stay untouched.
  size_t original = out.nodes.size();
  for (size_t i = 0; i < original; ++i) {
    if (!out.nodes[i].is_var) continue;
    auto it = sigma.find(out.nodes[i].label);
    if (it == sigma.end()) continue;
    auto [sp, fresh] = spliced.emplace(out.nodes[i].label, 0);
    if (fresh) {
      int offset = static_cast<int>(out.nodes.size());
      for (const TermNode& n : it->second.nodes) {
        TermNode copy = n;
        for (int& c : copy.children) c += offset;
        out.nodes.push_back(std::move(copy));
      }
      sp->second = it->second.root + offset;
    }
    // Alias the variable node to the spliced root.
    if (static_cast<int>(i) == sp->second) continue;
    TermNode replacement = out.nodes[static_cast<size_t>(sp->second)];
    out.nodes[i] = std::move(replacement);
  }
  return minimize(out);
}

bool is_finite(const RationalTerm& t) {
  // DFS cycle check on the reachable part.
  enum { White, Grey, Black };
  std::vector<int> color(t.nodes.size(), White);
  std::vector<std::pair<int, size_t>> stack{{t.root, 0}};
  color[static_cast<size_t>(t.root)] = Grey;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const TermNode& n = t.node(node);
    if (next == n.children.size()) {
      color[static_cast<size_t>(node)] = Black;
      stack.pop_back();
      continue;
    }
    int c = n.children[next++];
    if (color[static_cast<size_t>(c)] == Grey) return false;
    if (color[static_cast<size_t>(c)] == White) {
      color[static_cast<size_t>(c)] = Grey;
      stack.emplace_back(c, 0);
    }
  }
  return true;
}

namespace {

int height_node(const RationalTerm& t, int node) {
  int best = 0;
  for (int c : t.node(node).children) best = std::max(best, height_node(t, c));
  return 1 + best;
}

}  // namespace

int finite_height(const RationalTerm& t) {
  if (!is_finite(t)) fail("InfiniteTerm", "height of an infinite term");
  return height_node(t, t.root);
}

namespace {

FiniteTerm to_finite_node(const RationalTerm& t, int node) {
  const TermNode& n = t.node(node);
  FiniteTerm out{n.label, n.is_var, {}};
  for (int c : n.children) out.children.push_back(to_finite_node(t, c));
  return out;
}

int from_finite_node(const FiniteTerm& t, RationalTerm& out) {
  TermNode node{t.label, t.is_var, {}};
  for (const FiniteTerm& c : t.children) node.children.push_back(from_finite_node(c, out));
  out.nodes.push_back(std::move(node));
  return static_cast<int>(out.nodes.size()) - 1;
}

}  // namespace

FiniteTerm to_finite(const RationalTerm& t) {
  if (!is_finite(t)) fail("InfiniteTerm", "cannot unfold an infinite term to a finite one");
  return to_finite_node(t, t.root);
}

RationalTerm from_finite(const FiniteTerm& t, const Signature& sig) {
  RationalTerm out;
  out.root = from_finite_node(t, out);
  for (const TermNode& n : out.nodes) {
    if (n.is_var) continue;
    auto a = sig.arity(n.label);
    if (a && *a != static_cast<int>(n.children.size()))
      fail("ArityMismatch", n.label + " used with " + std::to_string(n.children.size()) +
                                " arguments");
  }
  return minimize(out);
}

std::vector<Position> positions_up_to(const RationalTerm& t, int max_depth) {
  std::vector<Position> out;
  // DFS, emitting the position before its extensions: lexicographic order.
  struct Frame {
    int node;
    Position pos;
  };
  std::vector<Frame> stack{{t.root, {}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    out.push_back(f.pos);
    if (static_cast<int>(f.pos.size()) >= max_depth) continue;
    const TermNode& n = t.node(f.node);
    for (int i = static_cast<int>(n.children.size()); i >= 1; --i) {
      Position p = f.pos;
      p.push_back(i);
      stack.push_back({n.children[static_cast<size_t>(i - 1)], std::move(p)});
    }
  }
  return out;
}

namespace {

struct Builder {
  const Signature& sig;
  RationalTerm graph;
  std::vector<std::pair<std::string, int>> scope;  // name -> node, innermost last
  std::set<int> binding_nodes;                     // every placeholder ever created

  explicit Builder(const Signature& s) : sig(s) {}

  int lookup(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return it->second;
    return -1;
  }

  int add_node(TermNode node) {
    graph.nodes.push_back(std::move(node));
    return static_cast<int>(graph.nodes.size()) - 1;
  }

  int build(const TermExpr& e) {
    switch (e.kind) {
      case TermExpr::Kind::Name: {
        int bound = lookup(e.head);
        if (bound >= 0) return bound;
        auto a = sig.arity(e.head);
        if (a) {
          if (*a != 0)
            fail("ArityMismatch", e.head + " has arity " + std::to_string(*a) +
                                      " but is used without arguments");
          return add_node({e.head, false, {}});
        }
        return add_node({e.head, true, {}});
      }
      case TermExpr::Kind::App: {
        if (lookup(e.head) >= 0)
          fail("ArityMismatch", "recursion name " + e.head + " used with arguments");
        auto a = sig.arity(e.head);
        if (!a) fail("UnboundName", "unknown symbol " + e.head);
        if (*a != static_cast<int>(e.args.size()))
          fail("ArityMismatch", e.head + " expects " + std::to_string(*a) + " arguments, got " +
                                    std::to_string(e.args.size()));
        std::vector<int> children;
        children.reserve(e.args.size());
        for (const TermExpr& arg : e.args) children.push_back(build(arg));
        return add_node({e.head, false, std::move(children)});
      }
      case TermExpr::Kind::Rec: {
        if (sig.contains(e.head))
          fail("BindingShadowsSymbol", "recursion name " + e.head + " is a symbol");
        int placeholder = add_node({"", false, {}});
        binding_nodes.insert(placeholder);
        scope.emplace_back(e.head, placeholder);
        int bound = build(e.args[0]);
        resolve_binding(e.head, placeholder, bound);
        int body = build(e.args[1]);
        scope.pop_back();
        return body;
      }
    }
    fail("Internal", "unreachable");
  }

  void resolve_binding(const std::string& name, int placeholder, int bound) {
    if (binding_nodes.count(bound))
      fail("UnguardedBinding", "binding " + name + " is a bare recursion name");
    graph.nodes[static_cast<size_t>(placeholder)] = graph.nodes[static_cast<size_t>(bound)];
  }
};

}  // namespace

RationalTerm make_term(const Signature& sig,
                       const std::vector<std::pair<std::string, TermExpr>>& bindings,
                       const TermExpr& root) {
  Builder b(sig);
  std::vector<int> holes;
  std::set<std::string> names;
  for (const auto& [name, expr] : bindings) {
    (void)expr;
    if (!names.insert(name).second) fail("DuplicateBinding", "binding " + name + " repeated");
    if (sig.contains(name)) fail("BindingShadowsSymbol", "binding " + name + " is a symbol");
    int placeholder = b.add_node({"", false, {}});
    b.binding_nodes.insert(placeholder);
    b.scope.emplace_back(name, placeholder);
    holes.push_back(placeholder);
  }
  for (size_t i = 0; i < bindings.size(); ++i) {
    int bound = b.build(bindings[i].second);
    b.resolve_binding(bindings[i].first, holes[i], bound);
  }
  int root_node = b.build(root);
  b.graph.root = root_node;
  return minimize(b.graph);
}

namespace {

bool plain_name(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

struct Printer {
  const RationalTerm& t;
  std::set<int> needs_name;
  std::map<int, std::string> names;
  std::set<std::string> used_labels;
  int fresh_counter = 0;

  explicit Printer(const RationalTerm& term) : t(term) {
    for (const TermNode& n : t.nodes) used_labels.insert(n.label);
    std::set<int> on_stack, done;
    mark(t.root, on_stack, done);
  }

  void mark(int node, std::set<int>& on_stack, std::set<int>& done) {
    if (on_stack.count(node)) {
      needs_name.insert(node);
      return;
    }
    if (done.count(node)) return;
    on_stack.insert(node);
    for (int c : t.node(node).children) mark(c, on_stack, done);
    on_stack.erase(node);
    done.insert(node);
  }

  std::string fresh() {
    static const char* base[] = {"X", "Y", "Z"};
    for (;;) {
      int i = fresh_counter++;
      std::string cand = std::string(base[i % 3]) + (i >= 3 ? std::to_string(i / 3) : "");
      if (!used_labels.count(cand)) return cand;
    }
  }

  std::string emit(int node, std::set<int>& open) {
    if (open.count(node)) return names.at(node);
    bool rec = needs_name.count(node) != 0;
    if (rec) {
      names.emplace(node, fresh());
      open.insert(node);
    }
    const TermNode& n = t.node(node);
    std::string body = plain_name(n.label) ? n.label : "'" + n.label + "'";
    if (!n.children.empty()) {
      body += "(";
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i) body += ",";
        body += emit(n.children[i], open);
      }
      body += ")";
    }
    if (rec) {
      open.erase(node);
      const std::string& name = names.at(node);
      return "rec " + name + " = " + body + " in " + name;
    }
    return body;
  }
};

}  // namespace

std::string print_term(const RationalTerm& t) {
  Printer p(t);
  std::set<int> open;
  return p.emit(t.root, open);
}

std::string print_term(const FiniteTerm& t) {
  std::string out = t.label;
  if (!t.children.empty()) {
    out += "(";
    for (size_t i = 0; i < t.children.size(); ++i) {
      if (i) out += ",";
      out += print_term(t.children[i]);
    }
    out += ")";
  }
  return out;
}

std::string print_position(const Position& p) {
  if (p.empty()) return "e";
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out += ".";
    out += std::to_string(p[i]);
  }
  return out;
}

std::string term_key(const RationalTerm& t) {
  std::ostringstream os;
  os << t.root << ";";
  for (const TermNode& n : t.nodes) {
    os << (n.is_var ? "v" : "s") << n.label << "(";
    for (int c : n.children) os << c << ",";
    os << ");";
  }
  return os.str();
}

std::vector<int> nodes_bisimilar_to(const RationalTerm& t, const RationalTerm& s) {
  std::vector<TermNode> combined = t.nodes;
  int offset = static_cast<int>(combined.size());
  for (const TermNode& n : s.nodes) {
    TermNode copy = n;
    for (int& c : copy.children) c += offset;
    combined.push_back(std::move(copy));
  }
  std::vector<int> cls = refine_classes(combined);
  int target = cls[static_cast<size_t>(s.root + offset)];
  std::vector<int> out;
  for (int i = 0; i < t.size(); ++i)
    if (cls[static_cast<size_t>(i)] == target) out.push_back(i);
  return out;
}

}  // namespace infinir
