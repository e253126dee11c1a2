#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bsde {

enum class GridScheme { Uniform, Geometric };

class TimeGrid {
 public:
  TimeGrid(std::vector<double> nodes, bool truncated_from_infinite = false);

  double horizon() const { return nodes_.back(); }
  std::size_t steps() const { return nodes_.size() - 1; }
  double node(std::size_t j) const { return nodes_[j]; }
  double dt(std::size_t j) const { return nodes_[j + 1] - nodes_[j]; }
  const std::vector<double>& nodes() const { return nodes_; }
  bool truncated_from_infinite() const { return truncated_; }
  std::size_t nearest_node(double t) const;

  bool operator==(const TimeGrid& other) const {
    return nodes_ == other.nodes_ && truncated_ == other.truncated_;
  }

 private:
  std::vector<double> nodes_;
  bool truncated_;
};

// Geometric steps shrink by `ratio` each step, so nodes cluster near the
// horizon when ratio < 1.
TimeGrid build_grid(double horizon, int steps,
                    GridScheme scheme = GridScheme::Uniform,
                    double ratio = 0.9, bool truncated_from_infinite = false);

// Brownian increments and positions, stored time-major:
// element (step j, path i, coordinate k) lives at (j * count + i) * dims + k.
class PathBundle {
 public:
  PathBundle(TimeGrid grid, std::size_t dims, std::size_t count,
             std::uint64_t seed, std::vector<double> increments);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dims() const { return dims_; }
  std::size_t count() const { return count_; }
  std::size_t steps() const { return grid_.steps(); }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> increment(std::size_t step, std::size_t path) const {
    return {increments_.data() + (step * count_ + path) * dims_, dims_};
  }
  std::span<const double> position(std::size_t step, std::size_t path) const {
    return {positions_.data() + (step * count_ + path) * dims_, dims_};
  }
  std::span<const double> increments_at(std::size_t step) const {
    return {increments_.data() + step * count_ * dims_, count_ * dims_};
  }
  std::span<const double> positions_at(std::size_t step) const {
    return {positions_.data() + step * count_ * dims_, count_ * dims_};
  }

 private:
  TimeGrid grid_;
  std::size_t dims_;
  std::size_t count_;
  std::uint64_t seed_;
  std::vector<double> increments_;
  std::vector<double> positions_;
};

PathBundle sample_paths(const TimeGrid& grid, std::size_t dims,
                        std::size_t count, std::uint64_t seed);

struct RegressionBasis {
  enum class Kind { Polynomial, Bins };

  Kind kind = Kind::Polynomial;
  int degree_or_bins = 3;
  // Adds increment features phi*u and phi*(u^2-1)/sqrt(2), u = dB/sqrt(dt).
  // Their coefficients give Z directly and act as control variates for the
  // conditional mean.
  bool increment_features = true;
  // Bins act on the first state coordinate. Without a fixed range the range
  // is taken from the sample at each step.
  std::optional<std::pair<double, double>> bin_range;

  static RegressionBasis polynomial(int degree, bool increment_features = true);
  static RegressionBasis bins(int count, bool increment_features = false);

  // Number of state features (before increment augmentation).
  std::size_t feature_count(std::size_t dims) const;
  // Feature vector for state b at time t. Polynomial features are
  // normalized Hermite products in b / sqrt(t); bins need a range.
  std::vector<double> feature_map(double t, std::span<const double> b) const;
};

int bin_index(double x, double lo, double hi, int bins);

// Design matrix with one row per state; states are row-major M x dims.
Eigen::MatrixXd design_matrix(const RegressionBasis& basis, double t,
                              std::span<const double> states,
                              std::size_t dims);

struct RegressionFit {
  Eigen::VectorXd coefficients;
  std::vector<double> fitted;
};

// Least squares with a minimum-norm answer for rank-deficient designs.
RegressionFit regress_conditional(std::span<const double> targets,
                                  const Eigen::MatrixXd& features);

// Conditional expectation operator E[. | F_{t_j}] for one grid step, built
// once and applied to many targets.
class StepProjector {
 public:
  StepProjector(const RegressionBasis& basis, const PathBundle& bundle,
                std::size_t step);

  // Writes the conditional mean of `target` into `mean`. When `z` is
  // non-empty (count x dims) also writes the martingale-increment estimate
  // E[target * dB] / dt. Returns the rms residual of the mean fit.
  double project(std::span<const double> target, std::span<double> mean,
                 std::span<double> z) const;

  std::size_t parameters() const { return parameters_; }

 private:
  void state_features(std::size_t path, double* out) const;
  std::size_t group_of(std::size_t path) const;
  std::size_t row_width() const;
  void full_row(std::size_t path, const double* phi, double* out) const;

  const RegressionBasis basis_;
  const PathBundle& bundle_;
  std::size_t step_;
  double t_;
  double dt_;
  double scale_;
  std::size_t dims_;
  std::size_t nphi_;
  std::size_t parameters_ = 0;
  std::vector<std::vector<int>> multi_indices_;
  double bin_lo_ = 0.0;
  double bin_hi_ = 0.0;
  int nbins_ = 1;
  std::vector<int> groups_;
  // One pseudo-inverse Gram matrix per group (a single group for
  // polynomial bases).
  std::vector<Eigen::MatrixXd> pinv_;
};

}  // namespace bsde
