#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Shell {
  fs::path dir;

  Shell() {
    dir = fs::temp_directory_path() / ("infinir-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Shell() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  fs::path write(const std::string& name, const std::string& content) const {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << content;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

  int run(const std::string& args, const std::string& stdout_file = "") const {
    std::string cmd = std::string(INFINIR_TOOL_PATH) + " " + args;
    cmd += stdout_file.empty() ? " >/dev/null" : (" >" + (dir / stdout_file).string());
    cmd += " 2>/dev/null";
    int status = std::system(cmd.c_str());
    return status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : -1);
  }
};

}  // namespace

TEST_CASE("exit codes follow the verdict") {
  Shell sh;
  fs::path trs = sh.write("ca.trs", "C(a) -> a\nterm cw = rec X = C(X) in X\n");
  CHECK(sh.run("check " + trs.string() + " --rel bi --from cw --to a") == 0);
  CHECK(sh.run("check " + trs.string() + " --rel ired --from cw --to a") == 1);
  CHECK(sh.run("check " + trs.string() + " --rel ieq --from cw --to a") == 3);  // mode error
  fs::path open = sh.write("open.trs", "f(x,x) -> D\na -> C(a)\nb -> C(b)\n");
  // f-rooted seeds block closure, and the search cannot prove this pair.
  CHECK(sh.run("check " + open.string() + " --rel ired --from 'f(a,D)' --to D") == 2);
  CHECK(sh.run("check " + sh.dir.string() + "/missing.trs --rel bi --from a --to a") == 3);
}

TEST_CASE("prove output is byte-identical across runs and re-verifies") {
  Shell sh;
  fs::path trs = sh.write("ex2.trs", "f(x,x) -> D\na -> C(a)\nb -> C(b)\n");
  fs::path c1 = sh.dir / "one.json";
  fs::path c2 = sh.dir / "two.json";
  CHECK(sh.run("prove " + trs.string() + " --rel ired --from 'f(a,b)' --to D --emit " +
               c1.string()) == 0);
  CHECK(sh.run("prove " + trs.string() + " --rel ired --from 'f(a,b)' --to D --emit " +
               c2.string()) == 0);
  CHECK(Shell::slurp(c1) == Shell::slurp(c2));
  CHECK_FALSE(Shell::slurp(c1).empty());
  CHECK(sh.run("verify " + c1.string() + " " + trs.string()) == 0);
}

TEST_CASE("compress subcommand emits steps or fails with NotLeftLinear") {
  Shell sh;
  fs::path grow = sh.write("grow.trs", "a -> C(a)\nterm cw = rec X = C(X) in X\n");
  fs::path cert = sh.dir / "grow.json";
  REQUIRE(sh.run("prove " + grow.string() + " --rel ired --from a --to cw --emit " +
                 cert.string()) == 0);
  CHECK(sh.run("compress " + cert.string() + " " + grow.string() + " --steps 3",
               "steps.txt") == 0);
  std::string steps = Shell::slurp(sh.dir / "steps.txt");
  CHECK(steps == "e  0  C(a)\n1  0  C(C(a))\n1.1  0  C(C(C(a)))\n");

  fs::path two = sh.write("ex2.trs", "f(x,x) -> D\na -> C(a)\nb -> C(b)\n");
  fs::path fab = sh.dir / "fab.json";
  REQUIRE(sh.run("prove " + two.string() + " --rel ired --from 'f(a,b)' --to D --emit " +
                 fab.string()) == 0);
  CHECK(sh.run("compress " + fab.string() + " " + two.string()) == 3);
}

TEST_CASE("unfold, distance and export-dot") {
  Shell sh;
  fs::path trs = sh.write("fig1.trs", "C(a) = a\nterm cw = rec X = C(X) in X\n");
  CHECK(sh.run("unfold " + trs.string() + " --term cw --depth 2", "unfold.txt") == 0);
  CHECK(Shell::slurp(sh.dir / "unfold.txt") == "C(C(#))\n");
  CHECK(sh.run("distance " + trs.string() + " --from cw --to 'C(a)'", "dist.txt") == 0);
  CHECK(Shell::slurp(sh.dir / "dist.txt") == "2^-1\n");
  CHECK(sh.run("distance " + trs.string() + " --from cw --to cw", "dist0.txt") == 0);
  CHECK(Shell::slurp(sh.dir / "dist0.txt") == "0\n");

  fs::path cert = sh.dir / "cert.json";
  REQUIRE(sh.run("prove " + trs.string() + " --rel ieq --from cw --to a --emit " +
                 cert.string()) == 0);
  CHECK(sh.run("export-dot " + cert.string() + " " + trs.string(), "cert.dot") == 0);
  CHECK(Shell::slurp(sh.dir / "cert.dot").find("digraph proof") == 0);
}

TEST_CASE("shipped samples behave as documented") {
  Shell sh;
  std::string dir = INFINIR_SAMPLES_DIR;
  CHECK(sh.run("check " + dir + "/growth.trs --rel ired --from a --to cw") == 0);
  CHECK(sh.run("check " + dir + "/backward.trs --rel bi --from cw --to a") == 0);
  CHECK(sh.run("check " + dir + "/backward.trs --rel ired --from cw --to a") == 1);
  CHECK(sh.run("check " + dir + "/equational.trs --rel ieq --from cw --to a") == 0);
  CHECK(sh.run("check " + dir + "/identify.trs --rel ieq --from a --to b") == 0);
  CHECK(sh.run("check " + dir + "/non_compressible.trs --rel ired --from 'f(a,b)' --to D") == 0);

  fs::path cert = sh.dir / "sample.cert.json";
  REQUIRE(sh.run("prove " + dir + "/non_compressible.trs --rel ired --from 'f(a,b)' --to D"
                 " --emit " + cert.string()) == 0);
  CHECK(sh.run("verify " + cert.string() + " " + dir + "/non_compressible.trs") == 0);
  CHECK(sh.run("compress " + cert.string() + " " + dir + "/non_compressible.trs") == 3);
}
