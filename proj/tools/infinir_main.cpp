#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "infinir/compression.hpp"
#include "infinir/parser.hpp"
#include "infinir/relation.hpp"

using namespace infinir;

namespace {

constexpr int kExitProved = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) fail("IoError", "cannot write " + path);
  out << content;
}

void require_mode(const Workspace& ws, RelationKind kind) {
  if (ws.mode == Workspace::Mode::Empty) return;
  bool equational = ws.mode == Workspace::Mode::Equational;
  if (kind == RelationKind::IEQ && !equational)
    fail("ModeError", "ieq needs an equational file ('=' rules)");
  if (kind != RelationKind::IEQ && equational)
    fail("ModeError", "bi and ired need a rewriting file ('->' rules)");
}

struct CheckOptions {
  std::string file;
  std::string rel = "ired";
  std::string from, to;
  std::string format = "text";
  std::string emit;
  int universe_budget = 64;
  SearchBudget budget;
};

struct CheckResult {
  Verdict verdict;
  Universe universe;
  bool used_search = false;
  SolveTrace trace;
  int from_index = -1, to_index = -1;
};

CheckResult run_check(const Workspace& ws, const CheckOptions& opt, bool want_certificate) {
  RelationKind kind = kind_from_name(opt.rel);
  require_mode(ws, kind);
  RationalTerm from = parse_term_in_workspace(opt.from, ws);
  RationalTerm to = parse_term_in_workspace(opt.to, ws);

  CheckResult result;
  result.universe = close_universe({from, to}, ws.trs, kind, opt.universe_budget);
  if (result.universe.closed) {
    result.trace = solve_relation(result.universe, kind, ws.trs, -1);
    result.from_index = result.universe.index_of(minimize(from));
    result.to_index = result.universe.index_of(minimize(to));
    if (result.trace.final.contains(result.from_index, result.to_index)) {
      result.verdict.kind = Verdict::Kind::Proved;
      if (want_certificate)
        result.verdict.certificate = extract_certificate(result.universe, ws.trs, result.trace,
                                                         result.from_index, result.to_index);
    } else {
      result.verdict.kind = Verdict::Kind::Refuted;
    }
    return result;
  }
  result.used_search = true;
  result.verdict = search_proof(from, to, kind, ws.trs, opt.budget);
  return result;
}

int verdict_exit(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Proved: return kExitProved;
    case Verdict::Kind::Refuted: return kExitRefuted;
    case Verdict::Kind::Unknown: return kExitUnknown;
  }
  return kExitError;
}

std::string verdict_name(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Proved: return "Proved";
    case Verdict::Kind::Refuted: return "Refuted";
    case Verdict::Kind::Unknown: return "Unknown";
  }
  return "?";
}

std::string describe(const CheckResult& result) {
  std::ostringstream os;
  os << verdict_name(result.verdict) << "\n";
  if (result.used_search)
    os << "universe open within budget; bounded search used\n";
  else
    os << "universe closed (" << result.universe.size() << " terms)\n";
  return os.str();
}

std::string relation_dump(const CheckResult& result) {
  // Deterministic listing of the solved relation on the closed universe.
  std::ostringstream os;
  os << "{\n  \"verdict\": \"" << verdict_name(result.verdict) << "\",\n";
  os << "  \"universe\": [";
  for (int i = 0; i < result.universe.size(); ++i) {
    if (i) os << ", ";
    os << "\"" << print_term(result.universe.terms[static_cast<size_t>(i)]) << "\"";
  }
  os << "],\n  \"pairs\": [";
  bool first = true;
  for (int i = 0; i < result.universe.size(); ++i)
    for (int j = 0; j < result.universe.size(); ++j)
      if (result.trace.final.contains(i, j)) {
        if (!first) os << ", ";
        first = false;
        os << "[" << i << "," << j << "]";
      }
  os << "]\n}\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  // INFINIR_SEED is reserved; the engines are deterministic and take no seed.
  if (std::getenv("INFINIR_SEED") != nullptr) {
    // ignored
  }

  CLI::App app{"infinir: rational-term infinitary rewriting toolkit"};
  app.require_subcommand(1);

  CheckOptions opt;
  std::string cert_path, out_path, term_text;
  int steps = -1;
  int depth = 8;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", opt.file, "TRS file")->required();
    cmd->add_option("--rel", opt.rel, "relation: ieq, bi or ired")
        ->check(CLI::IsMember({"ieq", "bi", "ired"}));
    cmd->add_option("--from", opt.from, "source term or name")->required();
    cmd->add_option("--to", opt.to, "target term or name")->required();
    cmd->add_option("--universe-budget", opt.universe_budget, "max universe size");
    cmd->add_option("--budget-goals", opt.budget.max_goals, "search: max goal pairs");
    cmd->add_option("--budget-split", opt.budget.max_split, "search: max split length");
    cmd->add_option("--budget-nodes", opt.budget.max_new_term_nodes,
                    "search: max nodes per candidate term");
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json", "dot"}));
    cmd->add_option("--emit", opt.emit, "write the main document to a file");
  };

  CLI::App* check = app.add_subcommand("check", "decide or search a relation query");
  add_common(check);
  CLI::App* prove = app.add_subcommand("prove", "like check, but always emit a certificate");
  add_common(prove);

  CLI::App* verify = app.add_subcommand("verify", "validate a proof certificate");
  verify->add_option("certificate", cert_path, "certificate file")->required();
  verify->add_option("file", opt.file, "TRS file")->required();

  CLI::App* compress_cmd = app.add_subcommand("compress", "compress an ired certificate");
  compress_cmd->add_option("certificate", cert_path, "certificate file")->required();
  compress_cmd->add_option("file", opt.file, "TRS file")->required();
  compress_cmd->add_option("--steps", steps, "also print the first K interleaved steps");
  compress_cmd->add_option("--emit", opt.emit, "write the ored document to a file");

  CLI::App* unfold = app.add_subcommand("unfold", "print a truncated unfolding");
  unfold->add_option("file", opt.file, "TRS file")->required();
  unfold->add_option("--term", term_text, "term or name")->required();
  unfold->add_option("--depth", depth, "truncation depth")->required();

  CLI::App* dist = app.add_subcommand("distance", "print the dyadic distance of two terms");
  dist->add_option("file", opt.file, "TRS file")->required();
  dist->add_option("--from", opt.from, "first term")->required();
  dist->add_option("--to", opt.to, "second term")->required();

  CLI::App* dot = app.add_subcommand("export-dot", "render a certificate as DOT");
  dot->add_option("certificate", cert_path, "certificate file")->required();
  dot->add_option("file", opt.file, "TRS file")->required();
  dot->add_option("--out", out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    Workspace ws = parse_trs_file(read_file(opt.file));

    if (check->parsed()) {
      CheckResult result = run_check(ws, opt, false);
      if (opt.format == "json" && !result.used_search)
        std::cout << relation_dump(result);
      else
        std::cout << describe(result);
      return verdict_exit(result.verdict);
    }

    if (prove->parsed()) {
      CheckResult result = run_check(ws, opt, true);
      std::cerr << describe(result);
      if (result.verdict.certificate) {
        if (opt.format == "dot")
          write_output(opt.emit, export_dot(*result.verdict.certificate));
        else
          write_output(opt.emit, proof_to_json(*result.verdict.certificate));
      }
      return verdict_exit(result.verdict);
    }

    if (verify->parsed()) {
      ProofGraph p = proof_from_json(read_file(cert_path), ws.trs.signature);
      ValidationReport report = validate(p, ws.trs);
      if (report.ok) {
        std::cout << "ok\n";
        return 0;
      }
      for (const Violation& v : report.violations)
        std::cout << "node " << v.node << " " << v.code << ": " << v.message << "\n";
      return 1;
    }

    if (compress_cmd->parsed()) {
      ProofGraph p = proof_from_json(read_file(cert_path), ws.trs.signature);
      OredCertificate o = compress(p, ws.trs);
      if (steps >= 0) {
        StepStream stream = emit_steps(o, steps);
        RationalTerm cur = stream.start;
        for (const Step& s : stream.steps) {
          cur = step_at(cur, s.pos, s.rule, ws.trs);
          std::cout << print_position(s.pos) << "  " << s.rule << "  " << print_term(cur)
                    << "\n";
        }
        if (!opt.emit.empty()) write_output(opt.emit, ored_to_json(o));
      } else {
        write_output(opt.emit, ored_to_json(o));
      }
      return 0;
    }

    if (unfold->parsed()) {
      RationalTerm t = parse_term_in_workspace(term_text, ws);
      std::cout << print_term(truncate(t, depth)) << "\n";
      return 0;
    }

    if (dist->parsed()) {
      DyadicDistance d = distance(parse_term_in_workspace(opt.from, ws),
                                  parse_term_in_workspace(opt.to, ws));
      if (d.is_zero)
        std::cout << "0\n";
      else
        std::cout << "2^-" << d.exponent << "\n";
      return 0;
    }

    if (dot->parsed()) {
      ProofGraph p = proof_from_json(read_file(cert_path), ws.trs.signature);
      write_output(out_path, export_dot(p));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
