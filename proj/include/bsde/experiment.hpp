#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsde/appendix.hpp"
#include "bsde/conditions.hpp"
#include "bsde/generators.hpp"
#include "bsde/solver.hpp"
#include "bsde/verify.hpp"

namespace bsde {

// Generator plus terminal data for one side of an experiment.
struct ProblemSpec {
  GeneratorSpec generator;
  std::string terminal = "clamp_bt(3)";
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::optional<ProblemSpec> prime;  // second problem for the comparison check

  double horizon = 1.0;
  int steps = 64;
  GridScheme scheme = GridScheme::Uniform;
  double ratio = 0.9;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;

  std::string basis = "poly";  // poly | bins
  int degree = 3;              // polynomial degree or bin count
  int ladder_n = 0;            // 0: plain solve
  int ladder_q = 0;

  // Condition ids, bound ids (3.2 remark3.2 3.3 comparison 4.6), ladder,
  // uniqueness, lemma:A1|A2|A3.
  std::vector<std::string> checks;
  double p = 2.0;
  CloudStrategy cloud = CloudStrategy::Random;
  std::size_t cloud_samples = 10000;
  std::size_t lemma_samples = 10000;
  double uniqueness_tol = 5e-3;

  std::string out_dir;
};

// Flat INI text: [problem], [prime], [grid], [solver], [checks], [output].
// Throws a Configuration error listing every problem found.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Canonical text form without the output directory; parsing it back
// reproduces every other field.
std::string config_text(const ExperimentConfig& c);

// Every validation problem; empty when the config is usable.
std::vector<std::string> validate_config(const ExperimentConfig& c);

const std::vector<std::string>& bound_catalog();

struct CheckOutcome {
  std::string id;
  std::string kind;     // condition | bound | ladder | uniqueness | lemma
  std::string verdict;  // pass/fail/inconclusive or satisfied/violated/...
  bool violated = false;
  std::string detail;   // structured text block
  std::string csv_name;
  std::string csv;
};

struct ReportDocument {
  std::string config_echo;
  std::string constants;
  std::vector<CheckOutcome> checks;
  std::string summary_csv;
  std::string solver_summary;
  std::vector<std::string> errors;  // solver failures and other recorded errors
  double wall_seconds = 0.0;        // kept out of report.txt

  bool any_violation() const;
  // report.txt contents; contains no timing so reruns compare byte-equal.
  std::string text() const;
};

ReportDocument run_experiment(const ExperimentConfig& c);
// report.txt, summary.csv, one CSV per bound check, timing.txt.
void write_report(const ReportDocument& doc, const std::string& dir);

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInternal = 3;

int exit_code_for(const ReportDocument& doc);

// Shared pieces used by the single-purpose subcommands.
PathBundle experiment_paths(const ExperimentConfig& c, std::size_t dims);
RegressionBasis experiment_basis(const ExperimentConfig& c);
SolutionField solve_problem(const ExperimentConfig& c, const ProblemSpec& p,
                            const PathBundle& bundle,
                            LadderResult* ladder = nullptr);
CheckOutcome run_bound_check(const ExperimentConfig& c, const std::string& id,
                             const Generator& g, const SolutionField& sol,
                             const PathBundle& bundle);

}  // namespace bsde
