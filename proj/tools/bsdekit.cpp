// Command-line front end: check-conditions, solve, verify-bounds,
// lemma-tests, run.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bsde/appendix.hpp"
#include "bsde/conditions.hpp"
#include "bsde/error.hpp"
#include "bsde/experiment.hpp"
#include "bsde/rng.hpp"

using namespace bsde;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<int> steps;
};

struct ProblemFlags {
  std::string config;
  std::string generator;
  std::string terminal;
  std::optional<double> alpha;
  std::optional<std::size_t> dims;
  std::string beta, gamma, expression, f;
  std::optional<double> linear_b, linear_c;

  void add(CLI::App* app, bool with_terminal) {
    app->add_option("--config", config, "base configuration file");
    app->add_option("--generator", generator, "generator id");
    if (with_terminal) app->add_option("--terminal", terminal, "terminal id");
    app->add_option("--alpha", alpha);
    app->add_option("--dims", dims);
    app->add_option("--beta", beta, "coefficient, e.g. exp(0.5,1)");
    app->add_option("--gamma", gamma);
    app->add_option("--expression", expression, "custom-expression body");
    app->add_option("--f", f, "f process for custom-expression");
    app->add_option("--linear-b", linear_b);
    app->add_option("--linear-c", linear_c);
  }

  ExperimentConfig build(const Globals& g) const {
    ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
    auto& gs = c.problem.generator;
    if (!generator.empty()) gs.id = generator;
    if (!terminal.empty()) c.problem.terminal = terminal;
    if (alpha) gs.alpha = *alpha;
    if (dims) gs.dims = *dims;
    if (!beta.empty()) gs.beta = parse_time_function(beta);
    if (!gamma.empty()) gs.gamma = parse_time_function(gamma);
    if (!expression.empty()) gs.expression = expression;
    if (!f.empty()) gs.f_process = f;
    if (linear_b) gs.linear_b = *linear_b;
    if (linear_c) gs.linear_c = *linear_c;
    if (g.seed) c.seed = *g.seed;
    if (g.paths) c.paths = *g.paths;
    if (g.steps) c.steps = *g.steps;
    return c;
  }
};

void check_valid(const ExperimentConfig& c) {
  const auto errors = validate_config(c);
  if (errors.empty()) return;
  std::string msg = std::to_string(errors.size()) + " configuration error(s):";
  for (const auto& e : errors) msg += "\n  " + e;
  fail(ErrorKind::Configuration, msg);
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::Configuration, "cannot write " + out);
  f << text;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Configuration:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Domain:
    case ErrorKind::InvalidCoefficient:
    case ErrorKind::UnsupportedDimension:
    case ErrorKind::InvalidHypothesis:
      return kExitConfig;
    default:
      return kExitInternal;
  }
}

// The solution file records the run; verification re-solves from it.
std::string run_file_for(const std::string& solution) { return solution + ".run"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BSDE experiment toolkit"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "master seed")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--paths", globals.paths, "Monte Carlo path count");
  app.add_option("--steps", globals.steps, "time steps");
  int code = kExitOk;

  // check-conditions
  auto* cc = app.add_subcommand("check-conditions", "sample-based condition checks");
  ProblemFlags cc_p;
  cc_p.add(cc, false);
  std::string cc_condition = "all", cc_cloud = "random", cc_out;
  std::size_t cc_samples = 10000;
  std::uint64_t cc_seed = 1;
  cc->add_option("--condition", cc_condition, "condition id or 'all'");
  cc->add_option("--samples", cc_samples);
  cc->add_option("--seed", cc_seed);
  cc->add_option("--cloud", cc_cloud, "grid | random | adversarial");
  cc->add_option("--out", cc_out, "write the report here instead of stdout");
  cc->callback([&] {
    Globals g = globals;
    if (!g.seed) g.seed = cc_seed;
    ExperimentConfig c = cc_p.build(g);
    check_valid(c);
    const Generator gen = make_generator(c.problem.generator);
    CloudOptions opt;
    opt.dims = c.problem.generator.dims;
    opt.horizon = c.horizon;
    const auto cloud = make_cloud(parse_cloud_strategy(cc_cloud), cc_samples,
                                  derive_seed(c.seed, "cloud"), opt);
    std::vector<std::string> ids;
    if (cc_condition == "all") ids = condition_catalog();
    else ids = {cc_condition};
    std::string text;
    for (const auto& id : ids) {
      try {
        const auto r = check_condition(gen, id, cloud);
        if (r.verdict == Verdict::Fail) code = kExitViolation;
        text += format_report(r) + "\n";
      } catch (const Error& e) {
        if (ids.size() == 1) throw;
        text += "condition: " + id + "\nverdict: skipped\nreason: " + e.what() + "\n\n";
      }
    }
    emit(cc_out, text);
  });

  // solve
  auto* sv = app.add_subcommand("solve", "solve a BSDE and write per-time summaries");
  ProblemFlags sv_p;
  sv_p.add(sv, true);
  std::vector<int> sv_ladder;
  std::string sv_out;
  std::optional<std::uint64_t> sv_seed;
  std::optional<std::size_t> sv_paths;
  std::optional<int> sv_steps;
  sv->add_option("--ladder", sv_ladder, "n_max q_max")->expected(2);
  sv->add_option("--seed", sv_seed);
  sv->add_option("--paths", sv_paths);
  sv->add_option("--steps", sv_steps);
  sv->add_option("--out", sv_out, "summary CSV path; the run record goes to <out>.run");
  sv->callback([&] {
    Globals g = globals;
    if (sv_seed) g.seed = sv_seed;
    if (sv_paths) g.paths = sv_paths;
    if (sv_steps) g.steps = sv_steps;
    ExperimentConfig c = sv_p.build(g);
    if (sv_ladder.size() == 2) {
      c.ladder_n = sv_ladder[0];
      c.ladder_q = sv_ladder[1];
    }
    c.checks.clear();
    check_valid(c);
    const PathBundle bundle = experiment_paths(c, c.problem.generator.dims);
    const SolutionField sol = solve_problem(c, c.problem, bundle);
    emit(sv_out, summary_csv(summarize(sol)));
    if (!sv_out.empty()) emit(run_file_for(sv_out), config_text(c));
  });

  // verify-bounds
  auto* vb = app.add_subcommand("verify-bounds", "re-solve a recorded run and check a bound");
  std::string vb_run, vb_bound, vb_out;
  std::optional<double> vb_p;
  vb->add_option("--run", vb_run, "solution file written by solve (or a config)")->required();
  vb->add_option("--bound", vb_bound, "3.2 | remark3.2 | 3.3 | comparison | 4.6")->required();
  vb->add_option("--p", vb_p);
  vb->add_option("--out", vb_out, "CSV path (stdout otherwise)");
  vb->callback([&] {
    const std::string path =
        std::filesystem::exists(run_file_for(vb_run)) ? run_file_for(vb_run) : vb_run;
    ExperimentConfig c = load_config(path);
    if (globals.seed) c.seed = *globals.seed;
    if (globals.paths) c.paths = *globals.paths;
    if (globals.steps) c.steps = *globals.steps;
    if (vb_p) c.p = *vb_p;
    c.checks = {vb_bound};
    check_valid(c);
    const Generator g = make_generator(c.problem.generator);
    const PathBundle bundle = experiment_paths(c, c.problem.generator.dims);
    const SolutionField sol = solve_problem(c, c.problem, bundle);
    const CheckOutcome o = run_bound_check(c, vb_bound, g, sol, bundle);
    std::cerr << o.detail;
    if (!o.csv.empty()) emit(vb_out, o.csv);
    if (o.violated) code = kExitViolation;
  });

  // lemma-tests
  auto* lt = app.add_subcommand("lemma-tests", "randomized checks of the appendix inequalities");
  std::string lt_lemma, lt_family = "all", lt_out;
  std::size_t lt_samples = 10000;
  std::uint64_t lt_seed = 1;
  lt->add_option("--lemma", lt_lemma, "A1 | A2 | A3")->required();
  lt->add_option("--family", lt_family, "family id or 'all'");
  lt->add_option("--samples", lt_samples);
  lt->add_option("--seed", lt_seed);
  lt->add_option("--out", lt_out);
  lt->callback([&] {
    const std::uint64_t seed = globals.seed.value_or(lt_seed);
    const LemmaId lemma = parse_lemma(lt_lemma);
    std::vector<std::string> fams;
    if (lt_family == "all") fams = lemma_family_catalog(lemma);
    else fams = {lt_family};
    std::string text;
    for (const auto& fam : fams) {
      const auto f = lemma_family(lemma, fam, derive_seed(seed, "lemma"));
      const auto s = lemma_samples(lt_samples, derive_seed(seed, "lemma-sweep"),
                                   f.a.value_or(1.0));
      const LemmaReport r = lemma == LemmaId::A1   ? lemmaA1_check(f, *f.k1, *f.k2, s)
                            : lemma == LemmaId::A2 ? lemmaA2_check(f, s)
                                                   : lemmaA3_check(f, s);
      if (!r.all_pass()) code = kExitViolation;
      text += format_lemma_report(r) + "\n";
    }
    emit(lt_out, text);
  });

  // run
  auto* rn = app.add_subcommand("run", "full pipeline from a configuration file");
  std::string rn_config, rn_out;
  rn->add_option("--config", rn_config)->required();
  rn->add_option("--out", rn_out, "output directory (overrides [output] dir)");
  rn->callback([&] {
    ExperimentConfig c = load_config(rn_config);
    if (globals.seed) c.seed = *globals.seed;
    if (globals.paths) c.paths = *globals.paths;
    if (globals.steps) c.steps = *globals.steps;
    if (!rn_out.empty()) c.out_dir = rn_out;
    check_valid(c);
    const ReportDocument doc = run_experiment(c);
    if (!c.out_dir.empty()) write_report(doc, c.out_dir);
    else std::cout << doc.text();
    for (const auto& e : doc.errors) std::cerr << "error: " << e << "\n";
    code = exit_code_for(doc);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return code;
}
