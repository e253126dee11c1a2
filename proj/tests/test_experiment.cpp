#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bsde/error.hpp"
#include "bsde/experiment.hpp"
#include "doctest.h"

using namespace bsde;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BSDEKIT_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cfg(const std::string& name) { return std::string(BSDEKIT_CONFIGS) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("bsdekit-test-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("parse a full configuration") {
  const auto c = parse_config(
      "[problem]\ngenerator = example2\nalpha = 1.4\nbeta = exp(0.5,1)\nterminal = clamp_bt(2)\n"
      "[prime]\nterminal = clamp_bt_shift(2,1)\n"
      "[grid]\nsteps = 32\npaths = 500\nseed = 9\n"
      "[solver]\nbasis = bins\ndegree = 12\n"
      "[checks]\nlist = EX1, comparison\np = 3\n");
  CHECK(c.problem.generator.id == "example2");
  CHECK(c.problem.generator.alpha == 1.4);
  CHECK(c.steps == 32);
  CHECK(c.paths == 500);
  CHECK(c.seed == 9);
  CHECK(c.basis == "bins");
  REQUIRE(c.prime.has_value());
  CHECK(c.prime->generator.id == "example2");
  CHECK(c.prime->terminal == "clamp_bt_shift(2,1)");
  CHECK(c.checks == std::vector<std::string>{"EX1", "comparison"});
  CHECK(c.p == 3.0);
  CHECK(validate_config(c).empty());
}

TEST_CASE("inline comments") {
  const auto c = parse_config("[problem]\ngenerator = zero   ; no drift\nterminal = clamp_bt(2) # bounded\n");
  CHECK(c.problem.generator.id == "zero");
  CHECK(c.problem.terminal == "clamp_bt(2)");
}

TEST_CASE("canonical text round trips") {
  const auto c = load_config(cfg("example1.ini"));
  const auto back = parse_config(config_text(c));
  CHECK(config_text(back) == config_text(c));
}

TEST_CASE("every configuration problem is listed") {
  try {
    parse_config("[problem]\ngenerator = example1\ncolour = blue\n[grid]\nsteps = x\n");
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
    const std::string w = e.what();
    CHECK(w.find("colour") != std::string::npos);
    CHECK(w.find("steps") != std::string::npos);
  }
  ExperimentConfig c;
  c.problem.generator.alpha = 2.5;
  c.checks = {"9.9"};
  const auto errs = validate_config(c);
  CHECK(errs.size() >= 2);
}

TEST_CASE("zero problem end to end") {
  auto c = load_config(cfg("zero.ini"));
  const auto doc = run_experiment(c);
  CHECK_FALSE(doc.any_violation());
  CHECK(exit_code_for(doc) == kExitOk);
  CHECK(doc.text().find("== result ==") != std::string::npos);
}

TEST_CASE("command-line exit codes") {
  const auto d = scratch("cli");
  CHECK(run_cli("run --config " + cfg("zero.ini") + " --out " + (d / "zero").string()) == kExitOk);
  CHECK(fs::exists(d / "zero" / "report.txt"));
  CHECK(fs::exists(d / "zero" / "summary.csv"));
  CHECK(run_cli("run --config " + cfg("violated_comparison.ini") + " --out " + (d / "v").string()) ==
        kExitViolation);
  std::ofstream(d / "bad.ini") << "[problem]\ngenerator = nope\n[grid]\nsteps = -1\n";
  CHECK(run_cli("run --config " + (d / "bad.ini").string()) == kExitConfig);
  CHECK(run_cli("no-such-command") == kExitConfig);
  CHECK(run_cli("lemma-tests --lemma A3 --family bump --samples 10000") == kExitViolation);
  CHECK(run_cli("lemma-tests --lemma A2 --family abs --samples 500 --out " + (d / "l.txt").string()) ==
        kExitViolation);  // intermediate remainder bound fails on |x|
  CHECK(run_cli("check-conditions --generator example2 --condition EX1 --samples 500") == kExitOk);
  CHECK(run_cli("check-conditions --generator custom-expression --expression 'znorm^2' "
                "--condition EX1 --samples 500") == kExitViolation);
  const std::string sol = (d / "sol.csv").string();
  CHECK(run_cli("--paths 500 --steps 8 solve --generator zero --terminal 'clamp_bt(1)' --out " + sol) == kExitOk);
  CHECK(run_cli("verify-bounds --run " + sol + " --bound 3.2 --out " + (d / "b.csv").string()) == kExitOk);
  CHECK(slurp(d / "b.csv").rfind("time,", 0) == 0);
}

TEST_CASE("reruns write identical files") {
  const auto d = scratch("det");
  auto c = load_config(cfg("example2_comparison.ini"));
  c.paths = 2000;
  write_report(run_experiment(c), (d / "a").string());
  write_report(run_experiment(c), (d / "b").string());
  int compared = 0;
  for (const auto& e : fs::directory_iterator(d / "a")) {
    const auto name = e.path().filename();
    if (name == "timing.txt") continue;
    CHECK_MESSAGE(slurp(e.path()) == slurp(d / "b" / name), name.string());
    ++compared;
  }
  CHECK(compared >= 3);
}
