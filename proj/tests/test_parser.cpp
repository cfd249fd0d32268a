#include <doctest.h>

#include <functional>

#include "support.hpp"

using namespace infinir;
using namespace infinir::test;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("rewriting mode with inferred constants") {
  Workspace ws = parse_trs_file("C(a) -> a\n");
  CHECK(ws.mode == Workspace::Mode::Rewriting);
  REQUIRE(ws.trs.rules.size() == 1);
  CHECK(ws.trs.signature.arity("C") == 1);
  CHECK(ws.trs.signature.arity("a") == 0);  // a is a constant, not a variable
  CHECK_FALSE(ws.trs.rules[0].lhs.children[0].is_var);
}

TEST_CASE("equational mode with a named term") {
  Workspace ws = parse_trs_file("C(a) = a\nterm cw = rec X = C(X) in X\n");
  CHECK(ws.mode == Workspace::Mode::Equational);
  CHECK(ws.trs.rules.size() == 1);
  REQUIRE(ws.named_terms.count("cw"));
  const RationalTerm& cw = ws.named_terms.at("cw");
  CHECK(cw.size() == 1);
  CHECK(cw.node(cw.root).label == "C");
}

TEST_CASE("default variable convention and overrides") {
  Workspace ws = parse_trs_file("f(x,x) -> D\na -> C(a)\nb -> C(b)\n");
  CHECK(ws.trs.rules.size() == 3);
  CHECK(ws.trs.rules[0].lhs.children[0].is_var);       // x is a variable
  CHECK(ws.trs.signature.arity("D") == 0);             // D is a constant
  CHECK_FALSE(ws.trs.signature.contains("x"));

  Workspace declared = parse_trs_file("var q\nf(q) -> q\n");
  CHECK(declared.trs.rules[0].lhs.children[0].is_var);

  Workspace forced = parse_trs_file("const x\nf(x) -> x\n");
  CHECK_FALSE(forced.trs.rules[0].lhs.children[0].is_var);
}

TEST_CASE("mode and syntax errors carry positions") {
  CHECK(code_of([] { parse_trs_file("C(a) -> a\nC(a) = a\n"); }) == "ModeError");
  CHECK(code_of([] { parse_trs_file("C(a -> a\n"); }) == "SyntaxError");
  CHECK(message_of([] { parse_trs_file("C(a -> a\n"); }).find("1:5") != std::string::npos);
  CHECK(code_of([] { parse_trs_file("f(x) -> f(x,x)\n"); }) == "SyntaxError");  // arity clash
  CHECK(code_of([] { parse_trs_file("rec X = C(X) in X -> a\n"); }) == "SyntaxError");
  CHECK(code_of([] { parse_trs_file("x -> a\n"); }) == "LhsIsVariable");
}

TEST_CASE("rec on right-hand sides") {
  Workspace ws = parse_trs_file("a -> rec X = C(X) in X\n");
  REQUIRE(ws.trs.rules.size() == 1);
  CHECK(ws.trs.rules[0].rhs.size() == 1);
  CHECK_FALSE(ws.trs.rules[0].invertible);  // infinite rhs cannot be matched
}

TEST_CASE("workspace term resolution") {
  Workspace ws = parse_trs_file("C(a) = a\nterm cw = rec X = C(X) in X\n");
  CHECK(parse_term_in_workspace("cw", ws) == ws.named_terms.at("cw"));
  CHECK(parse_term_in_workspace("C(cw)", ws) == ws.named_terms.at("cw"));
  CHECK(parse_term_in_workspace("C(a)", ws) ==
        parse_term("C(a)", ws.trs.signature));
}

TEST_CASE("comments and blank lines") {
  Workspace ws = parse_trs_file("# a comment\n\nC(a) -> a  # trailing\n");
  CHECK(ws.trs.rules.size() == 1);
}
