#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bsde/generators.hpp"
#include "bsde/stochastic.hpp"

namespace bsde {

struct SolveOptions {
  double fixed_point_tol = 1e-10;
  int max_fixed_point_iter = 500;
};

struct SolutionField {
  PathField field;
  const PathBundle* bundle = nullptr;
  std::string method;
  // Per step: rms residual of the regression fit, and mean and standard
  // error over paths of the one-step consistency residual
  // Y_j - (Y_{j+1} + g dt - Z.dB).
  std::vector<double> residual_rms;
  std::vector<double> consistency_mean;
  std::vector<double> consistency_se;
  std::size_t parameters = 0;  // regression parameters per step
  int iterations = 0;          // Picard only

  const TimeGrid& grid() const { return bundle->grid(); }
  std::size_t count() const { return field.count; }
  std::size_t steps() const { return field.steps; }
  std::size_t dims() const { return field.dims; }
  double Y(std::size_t step, std::size_t path) const {
    return field.Y(step, path);
  }
  std::span<const double> Z(std::size_t step, std::size_t path) const {
    return field.Z(step, path);
  }
  std::span<const double> Y_at(std::size_t step) const {
    return {field.y->data() + step * field.count, field.count};
  }
};

// Values of a process at every node and path, time-major (N+1) x M.
std::vector<double> process_values(const FProcess& f, const PathBundle& bundle);

EvalPoint eval_point(const PathBundle& bundle, std::size_t step,
                     std::size_t path);

// Backward regression sweep, implicit in y.
SolutionField solve_bounded(const Generator& g, const TerminalData& xi,
                            const PathBundle& bundle,
                            const RegressionBasis& basis,
                            const SolveOptions& options = {});

// Fixed-point iteration on whole fields; stops when the sup-change of
// (Y, Z) drops below tol.
SolutionField picard_solve(const Generator& g, const TerminalData& xi,
                           const PathBundle& bundle,
                           const RegressionBasis& basis, int max_iter = 60,
                           double tol = 1e-8);

struct LadderSnapshot {
  TruncationIndex idx;
  std::vector<double> y_mean;  // per node
};

struct LadderResult {
  SolutionField final;
  std::vector<LadderSnapshot> snapshots;
  std::size_t violations = 0;
  std::size_t comparisons = 0;
  double violation_fraction = 0.0;
  // gaps[k]: sup over nodes of the path rms of Y^{k} - Y^{k-1} along the
  // diagonal (entry 0 unused).
  std::vector<double> diagonal_gaps;
  double convergence_gap = 0.0;
};

struct LadderOptions {
  SolveOptions solve;
  // Comparisons within tol * (1 + |Y|) are not counted as violations.
  double monotone_tol = 1e-8;
};

// Truncated solves along the diagonal plus first row and column of the
// (n, q) lattice, over powers of two up to n_max and q_max.
LadderResult solve_ladder(const Generator& g, const TerminalData& xi,
                          const PathBundle& bundle,
                          const RegressionBasis& basis, int n_max, int q_max,
                          const LadderOptions& options = {});

struct ThetaResidual {
  double theta = 0.0;
  std::vector<double> dU;  // (N+1) x M
  std::vector<double> dV;  // N x M x d
  // Largest |mean over paths| of the one-step residual of (dU, dV) against
  // the theta-difference generator, and the tolerance implied by the two
  // input solutions' own residuals. Both zero when no generators are given.
  double consistency_max = 0.0;
  double consistency_tolerance = 0.0;
};

ThetaResidual theta_residual(const SolutionField& sol,
                             const SolutionField& sol_prime, double theta,
                             const Generator* g = nullptr,
                             const Generator* g_prime = nullptr);

struct SummaryRow {
  double time;
  double y_mean;
  double y_q05;
  double y_q95;
  double z_norm_mean;  // NaN at the horizon
};

std::vector<SummaryRow> summarize(const SolutionField& sol);
std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace bsde
