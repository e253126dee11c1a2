#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bsde/constants.hpp"
#include "bsde/generators.hpp"
#include "bsde/moments.hpp"
#include "bsde/solver.hpp"

namespace bsde {

enum class BoundVerdict { Satisfied, Violated, Indeterminate };
std::string to_string(BoundVerdict v);

struct BoundRow {
  double time = 0.0;
  // Log-space for the moment bounds; natural scale for comparison rows
  // (lhs = worst Y - Y', rhs = epsilon).
  double lhs = 0.0;
  double rhs = 0.0;
  double se = 0.0;
  BoundVerdict verdict = BoundVerdict::Satisfied;
  double margin_min = 0.0;     // over conditioning bins at this time
  double margin_median = 0.0;
};

struct BoundCheckResult {
  std::string bound;
  bool log_scale = true;
  std::vector<BoundRow> rows;
  BoundVerdict verdict = BoundVerdict::Satisfied;
  double worst_margin = 0.0;
  // Comparison checks only.
  std::size_t violations = 0;
  std::size_t comparisons = 0;
  double violation_fraction = 0.0;
};

// time,log_lhs,log_rhs,se,verdict
std::string bound_csv(const BoundCheckResult& r);

// f_t + beta|Y'_t| + gamma [ln(e + |Z'_t|)]^{alpha*/2} per node and path,
// time-major, with the extended-convexity coefficients of the profile.
std::vector<double> fhat_process(const CoefficientProfile& profile,
                                 const SolutionField& sol_prime);

struct FhatMomentResult {
  MomentEstimate fhat;  // E[exp(p (int_0^T fhat)^{2/alpha*})]
  // Present when Jensen inputs are supplied: the log-term moment and its
  // majorant E[(k_alpha + int |Z'| dmu)^{delta_p}].
  std::optional<MomentEstimate> log_term;
  std::optional<MomentEstimate> jensen_majorant;
  bool consistent = true;
};

struct JensenInputs {
  TimeFunction gamma;
  const SolutionField* prime = nullptr;
};

FhatMomentResult verify_fhat_moment(const std::vector<double>& fhat,
                                    const TimeGrid& grid, std::size_t count,
                                    double p, double alpha_star,
                                    const std::optional<JensenInputs>& jensen =
                                        std::nullopt);

enum class PointwiseVariant { TwoSided, OneSided };

struct BoundOptions {
  std::size_t bins = 20;     // conditioning bins on B_t for E_t[.]
  double se_multiplier = 3.0;
  double indeterminate_ratio = 0.5;
};

// exp(|Y_t|^{2/alpha*}) + E_t[int_t^T |Z|^2]
//   <= K E_t[exp(K (|xi| + int_t^T f)^{2/alpha*})]
// at decile times; one-sided variant uses Y^+, 1_{Y>0}|Z|^2 and xi^+.
BoundCheckResult verify_pointwise_bound(const SolutionField& sol,
                                        const ConstantSet& constants,
                                        const TerminalData& xi,
                                        const FProcess& f,
                                        PointwiseVariant variant =
                                            PointwiseVariant::TwoSided,
                                        const BoundOptions& options = {});

// E[exp(p (sup_[t,T] |Y|)^{2/alpha*})] + E[(int_t^T |Z|^2)^{p/2}]
//   <= K_p E[exp(K_p (|xi| + int_t^T f)^{2/alpha*})] at t in {0, T/2}.
BoundCheckResult verify_sup_bound(const SolutionField& sol,
                                  const ConstantSet& constants,
                                  const TerminalData& xi, const FProcess& f,
                                  double p, const BoundOptions& options = {});

struct ComparisonPolicy {
  double c = 0.1;  // epsilon = c (sqrt(max dt) + regression error proxy)
  double max_violation_fraction = 0.005;
};

// Nodewise Y <= Y' + epsilon. Throws PreconditionViolation when the terminal
// values are not ordered on some path.
BoundCheckResult verify_comparison(const SolutionField& sol,
                                   const SolutionField& sol_prime,
                                   const ComparisonPolicy& policy = {});

double comparison_epsilon(const SolutionField& sol,
                          const SolutionField& sol_prime,
                          const ComparisonPolicy& policy);

}  // namespace bsde
