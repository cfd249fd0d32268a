#include "infinir/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <vector>

namespace infinir {

namespace {

struct Token {
  enum class Kind { Name, LParen, RParen, Comma, Arrow, Equals, End };
  Kind kind;
  std::string text;
  int line;
  int col;
};

[[noreturn]] void syntax_error(int line, int col, const std::string& message) {
  fail("SyntaxError", std::to_string(line) + ":" + std::to_string(col) + ": " + message);
}

std::vector<Token> tokenize_line(const std::string& line, int line_no) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    int col = static_cast<int>(i) + 1;
    if (c == '#') break;  // comment to end of line
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({Token::Kind::LParen, "(", line_no, col});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::Kind::RParen, ")", line_no, col});
      ++i;
    } else if (c == ',') {
      out.push_back({Token::Kind::Comma, ",", line_no, col});
      ++i;
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({Token::Kind::Arrow, "->", line_no, col});
      i += 2;
    } else if (c == '=') {
      out.push_back({Token::Kind::Equals, "=", line_no, col});
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i;
      while (i < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_'))
        ++i;
      out.push_back({Token::Kind::Name, line.substr(start, i - start), line_no, col});
    } else {
      syntax_error(line_no, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::Kind::End, "", line_no, static_cast<int>(line.size()) + 1});
  return out;
}

struct ExprParser {
  const std::vector<Token>& tokens;
  size_t pos = 0;

  const Token& peek() const { return tokens[pos]; }
  Token next() { return tokens[pos++]; }

  bool at_name(const std::string& text) const {
    return peek().kind == Token::Kind::Name && peek().text == text;
  }

  TermExpr parse_expr() {
    if (at_name("rec")) {
      Token rec = next();
      if (peek().kind != Token::Kind::Name)
        syntax_error(rec.line, rec.col, "rec needs a name");
      std::string name = next().text;
      if (peek().kind != Token::Kind::Equals)
        syntax_error(peek().line, peek().col, "expected '=' in rec binding");
      next();
      TermExpr bound = parse_expr();
      if (!at_name("in")) syntax_error(peek().line, peek().col, "expected 'in'");
      next();
      TermExpr body = parse_expr();
      return TermExpr::rec(name, std::move(bound), std::move(body));
    }
    if (peek().kind != Token::Kind::Name)
      syntax_error(peek().line, peek().col, "expected a term");
    Token head = next();
    if (head.text == "in")
      syntax_error(head.line, head.col, "'in' outside a rec expression");
    if (peek().kind != Token::Kind::LParen) return TermExpr::name(head.text);
    next();
    std::vector<TermExpr> args;
    if (peek().kind == Token::Kind::RParen)
      syntax_error(peek().line, peek().col, "empty argument list");
    for (;;) {
      args.push_back(parse_expr());
      if (peek().kind == Token::Kind::Comma) {
        next();
        continue;
      }
      if (peek().kind == Token::Kind::RParen) {
        next();
        break;
      }
      syntax_error(peek().line, peek().col, "expected ',' or ')'");
    }
    return TermExpr::app(head.text, std::move(args));
  }
};

bool default_variable_name(const std::string& name) {
  if (name.empty()) return false;
  if (name[0] != 'x' && name[0] != 'y' && name[0] != 'z') return false;
  for (size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  return true;
}

struct InferenceState {
  std::map<std::string, std::pair<int, Token>> applied;  // name -> (arity, first use)
  std::set<std::string> bare;
  std::set<std::string> declared_vars;
  std::set<std::string> declared_consts;

  void scan(const TermExpr& e, std::set<std::string> bound, const Token& where) {
    switch (e.kind) {
      case TermExpr::Kind::Name:
        if (!bound.count(e.head)) bare.insert(e.head);
        return;
      case TermExpr::Kind::App: {
        if (bound.count(e.head))
          syntax_error(where.line, where.col, "recursion name " + e.head + " applied");
        int arity = static_cast<int>(e.args.size());
        auto [it, fresh] = applied.emplace(e.head, std::make_pair(arity, where));
        if (!fresh && it->second.first != arity)
          syntax_error(where.line, where.col,
                       e.head + " used with arity " + std::to_string(arity) + " and " +
                           std::to_string(it->second.first));
        for (const TermExpr& a : e.args) scan(a, bound, where);
        return;
      }
      case TermExpr::Kind::Rec: {
        std::set<std::string> inner = bound;
        inner.insert(e.head);
        scan(e.args[0], inner, where);
        scan(e.args[1], inner, where);
        return;
      }
    }
  }

  Signature infer() const {
    Signature sig;
    for (const auto& [name, info] : applied) {
      if (declared_vars.count(name))
        syntax_error(info.second.line, info.second.col, "variable " + name + " applied");
      sig.add(name, info.first);
    }
    for (const std::string& name : bare) {
      if (sig.contains(name)) continue;
      if (declared_vars.count(name)) continue;
      if (default_variable_name(name) && !declared_consts.count(name)) continue;
      sig.add(name, 0);
    }
    for (const std::string& name : declared_consts)
      if (!sig.contains(name)) sig.add(name, 0);
    return sig;
  }
};

void forbid_rec(const TermExpr& e, const Token& where) {
  if (e.kind == TermExpr::Kind::Rec)
    syntax_error(where.line, where.col, "rec is only allowed on right-hand sides");
  for (const TermExpr& a : e.args) forbid_rec(a, where);
}

FiniteTerm expr_to_pattern(const TermExpr& e, const Signature& sig) {
  if (e.kind == TermExpr::Kind::Name) {
    if (sig.contains(e.head)) return FiniteTerm{e.head, false, {}};
    return FiniteTerm{e.head, true, {}};
  }
  FiniteTerm out{e.head, false, {}};
  for (const TermExpr& a : e.args) out.children.push_back(expr_to_pattern(a, sig));
  return out;
}

struct ParsedLine {
  enum class Kind { Rule, TermDecl, VarDecl, ConstDecl } kind;
  TermExpr lhs, rhs;       // Rule
  bool equational = false; // Rule
  std::string name;        // TermDecl
  TermExpr body;           // TermDecl
  std::vector<std::string> names;  // Var/Const decls
  Token where;
};

}  // namespace

Workspace parse_trs_file(const std::string& text) {
  std::vector<ParsedLine> lines;
  InferenceState inference;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::vector<Token> tokens = tokenize_line(raw, line_no);
    if (tokens.size() == 1) continue;  // blank or comment
    ExprParser parser{tokens};
    const Token& first = tokens[0];

    if (first.kind == Token::Kind::Name &&
        (first.text == "var" || first.text == "const")) {
      ParsedLine decl;
      decl.kind = first.text == "var" ? ParsedLine::Kind::VarDecl : ParsedLine::Kind::ConstDecl;
      decl.where = first;
      parser.next();
      while (parser.peek().kind == Token::Kind::Name) decl.names.push_back(parser.next().text);
      if (parser.peek().kind != Token::Kind::End)
        syntax_error(parser.peek().line, parser.peek().col, "expected names only");
      if (decl.names.empty()) syntax_error(first.line, first.col, "empty declaration");
      for (const std::string& n : decl.names)
        (decl.kind == ParsedLine::Kind::VarDecl ? inference.declared_vars
                                                : inference.declared_consts)
            .insert(n);
      lines.push_back(std::move(decl));
      continue;
    }

    if (first.kind == Token::Kind::Name && first.text == "term") {
      ParsedLine decl;
      decl.kind = ParsedLine::Kind::TermDecl;
      decl.where = first;
      parser.next();
      if (parser.peek().kind != Token::Kind::Name)
        syntax_error(first.line, first.col, "term declaration needs a name");
      decl.name = parser.next().text;
      if (parser.peek().kind != Token::Kind::Equals)
        syntax_error(parser.peek().line, parser.peek().col, "expected '='");
      parser.next();
      decl.body = parser.parse_expr();
      if (parser.peek().kind != Token::Kind::End)
        syntax_error(parser.peek().line, parser.peek().col, "trailing input");
      inference.scan(decl.body, {}, decl.where);
      lines.push_back(std::move(decl));
      continue;
    }

    ParsedLine rule;
    rule.kind = ParsedLine::Kind::Rule;
    rule.where = first;
    rule.lhs = parser.parse_expr();
    if (parser.peek().kind == Token::Kind::Arrow)
      rule.equational = false;
    else if (parser.peek().kind == Token::Kind::Equals)
      rule.equational = true;
    else
      syntax_error(parser.peek().line, parser.peek().col, "expected '->' or '='");
    parser.next();
    rule.rhs = parser.parse_expr();
    if (parser.peek().kind != Token::Kind::End)
      syntax_error(parser.peek().line, parser.peek().col, "trailing input");
    forbid_rec(rule.lhs, rule.where);
    inference.scan(rule.lhs, {}, rule.where);
    inference.scan(rule.rhs, {}, rule.where);
    lines.push_back(std::move(rule));
  }

  Workspace ws;
  ws.trs.signature = inference.infer();
  for (const ParsedLine& line : lines) {
    switch (line.kind) {
      case ParsedLine::Kind::VarDecl:
      case ParsedLine::Kind::ConstDecl:
        break;
      case ParsedLine::Kind::TermDecl: {
        if (ws.trs.signature.contains(line.name))
          syntax_error(line.where.line, line.where.col,
                       "term name " + line.name + " collides with a symbol");
        RationalTerm value = make_term(ws.trs.signature, {}, line.body);
        auto [it, fresh] = ws.named_terms.emplace(line.name, std::move(value));
        (void)it;
        if (!fresh)
          syntax_error(line.where.line, line.where.col, "term " + line.name + " redefined");
        break;
      }
      case ParsedLine::Kind::Rule: {
        Workspace::Mode mode =
            line.equational ? Workspace::Mode::Equational : Workspace::Mode::Rewriting;
        if (ws.mode == Workspace::Mode::Empty)
          ws.mode = mode;
        else if (ws.mode != mode)
          fail("ModeError", "file mixes '->' rules and '=' equations");
        FiniteTerm lhs = expr_to_pattern(line.lhs, ws.trs.signature);
        RationalTerm rhs = make_term(ws.trs.signature, {}, line.rhs);
        ws.trs.rules.push_back(check_rule(lhs, rhs, ws.trs.signature));
        break;
      }
    }
  }
  return ws;
}

RationalTerm parse_term(const std::string& text, const Signature& sig) {
  std::vector<Token> tokens = tokenize_line(text, 1);
  ExprParser parser{tokens};
  TermExpr expr = parser.parse_expr();
  if (parser.peek().kind != Token::Kind::End)
    syntax_error(parser.peek().line, parser.peek().col, "trailing input");
  return make_term(sig, {}, expr);
}

RationalTerm parse_term_in_workspace(const std::string& text, const Workspace& ws) {
  std::vector<Token> tokens = tokenize_line(text, 1);
  ExprParser parser{tokens};
  TermExpr expr = parser.parse_expr();
  if (parser.peek().kind != Token::Kind::End)
    syntax_error(parser.peek().line, parser.peek().col, "trailing input");
  // Rec names never surface as variables, so free names matching workspace
  // terms can be substituted after the build.
  RationalTerm built = make_term(ws.trs.signature, {}, expr);
  Substitution sigma;
  for (const std::string& v : variables_of(built)) {
    auto it = ws.named_terms.find(v);
    if (it != ws.named_terms.end()) sigma[v] = it->second;
  }
  if (sigma.empty()) return built;
  return substitute(built, sigma);
}

}  // namespace infinir
