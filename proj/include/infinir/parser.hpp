#pragma once

#include <map>
#include <string>

#include "infinir/trs.hpp"

namespace infinir {

/// A parsed TRS file: rules/equations plus named terms.
struct Workspace {
  enum class Mode { Empty, Equational, Rewriting };
  Trs trs;
  Mode mode = Mode::Empty;
  std::map<std::string, RationalTerm> named_terms;
};

/// File format (docs/formats.md): one `lhs -> rhs` or `lhs = rhs` per line,
/// `term <name> = <expr>`, `var`/`const` directives, `#` comments. The
/// signature is inferred from use; identifiers matching [xyz][0-9]* are
/// variables unless declared otherwise.
Workspace parse_trs_file(const std::string& text);

/// Parses a standalone term expression over an existing signature.
RationalTerm parse_term(const std::string& text, const Signature& sig);

/// Like parse_term, but names may also resolve to workspace terms.
RationalTerm parse_term_in_workspace(const std::string& text, const Workspace& ws);

}  // namespace infinir
