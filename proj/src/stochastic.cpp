#include "bsde/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "bsde/error.hpp"
#include "bsde/rng.hpp"

namespace bsde {

namespace {

// Multi-indices of total degree <= degree in `dims` variables, ordered by
// total degree.
std::vector<std::vector<int>> multi_indices(std::size_t dims, int degree) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= degree; ++total) {
    // enumerate compositions of `total` into `dims` parts
    std::vector<int> idx(dims, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos,
                                                     int left) {
      if (pos + 1 == dims) {
        idx[pos] = left;
        out.push_back(idx);
        return;
      }
      for (int v = left; v >= 0; --v) {
        idx[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

// Normalized probabilists' Hermite polynomials h_0..h_n at x.
void hermite(double x, int n, double* out) {
  out[0] = 1.0;
  if (n >= 1) out[1] = x;
  for (int k = 1; k < n; ++k) out[k + 1] = x * out[k] - k * out[k - 1];
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) {
    fact *= k;
    out[k] /= std::sqrt(fact);
  }
}

Eigen::MatrixXd pseudo_inverse_sym(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double top = lam.size() ? std::max(lam.maxCoeff(), 0.0) : 0.0;
  const double cut = top * 1e-11;
  Eigen::VectorXd inv(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    inv[i] = (lam[i] > cut && lam[i] > 0.0) ? 1.0 / lam[i] : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> nodes, bool truncated_from_infinite)
    : nodes_(std::move(nodes)), truncated_(truncated_from_infinite) {
  require(nodes_.size() >= 2, ErrorKind::InvalidArgument,
          "time grid needs at least one step");
  require(nodes_.front() == 0.0, ErrorKind::InvalidArgument,
          "time grid must start at 0");
  for (std::size_t j = 0; j + 1 < nodes_.size(); ++j)
    require(nodes_[j + 1] > nodes_[j], ErrorKind::InvalidArgument,
            "time grid nodes must be strictly increasing");
}

std::size_t TimeGrid::nearest_node(double t) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.end()) return steps();
  std::size_t j = static_cast<std::size_t>(it - nodes_.begin());
  if (j > 0 && (t - nodes_[j - 1]) <= (nodes_[j] - t)) return j - 1;
  return j;
}

TimeGrid build_grid(double horizon, int steps, GridScheme scheme,
                    double ratio, bool truncated_from_infinite) {
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::InvalidArgument,
          "horizon must be a positive finite time");
  require(steps >= 1, ErrorKind::InvalidArgument, "steps must be >= 1");
  std::vector<double> nodes(static_cast<std::size_t>(steps) + 1);
  nodes[0] = 0.0;
  if (scheme == GridScheme::Uniform) {
    for (int j = 1; j <= steps; ++j)
      nodes[j] = horizon * static_cast<double>(j) / steps;
  } else {
    require(ratio > 0.0 && ratio != 1.0, ErrorKind::InvalidArgument,
            "geometric ratio must be positive and different from 1");
    const double first =
        horizon * (1.0 - ratio) / (1.0 - std::pow(ratio, steps));
    double step = first;
    for (int j = 1; j <= steps; ++j) {
      nodes[j] = nodes[j - 1] + step;
      step *= ratio;
    }
  }
  nodes[steps] = horizon;
  return TimeGrid(std::move(nodes), truncated_from_infinite);
}

PathBundle::PathBundle(TimeGrid grid, std::size_t dims, std::size_t count,
                       std::uint64_t seed, std::vector<double> increments)
    : grid_(std::move(grid)),
      dims_(dims),
      count_(count),
      seed_(seed),
      increments_(std::move(increments)) {
  const std::size_t n = grid_.steps();
  require(increments_.size() == n * count_ * dims_,
          ErrorKind::InvalidArgument, "increment array has the wrong size");
  positions_.assign((n + 1) * count_ * dims_, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double* inc = increments_.data() + j * count_ * dims_;
    const double* prev = positions_.data() + j * count_ * dims_;
    double* next = positions_.data() + (j + 1) * count_ * dims_;
    for (std::size_t e = 0; e < count_ * dims_; ++e) next[e] = prev[e] + inc[e];
  }
}

PathBundle sample_paths(const TimeGrid& grid, std::size_t dims,
                        std::size_t count, std::uint64_t seed) {
  require(dims >= 1, ErrorKind::InvalidArgument, "dims must be >= 1");
  require(count >= 1, ErrorKind::InvalidArgument, "path count must be >= 1");
  const std::size_t n = grid.steps();
  std::vector<double> inc(n * count * dims);
  const CounterRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double sd = std::sqrt(grid.dt(j));
      for (std::size_t k = 0; k < dims; ++k)
        inc[(j * count + i) * dims + k] = sd * rng.normal(i, j * dims + k);
    }
  }
  return PathBundle(grid, dims, count, seed, std::move(inc));
}

RegressionBasis RegressionBasis::polynomial(int degree,
                                            bool increment_features) {
  require(degree >= 0, ErrorKind::InvalidArgument,
          "polynomial degree must be >= 0");
  RegressionBasis b;
  b.kind = Kind::Polynomial;
  b.degree_or_bins = degree;
  b.increment_features = increment_features;
  return b;
}

RegressionBasis RegressionBasis::bins(int count, bool increment_features) {
  require(count >= 1, ErrorKind::InvalidArgument, "bin count must be >= 1");
  RegressionBasis b;
  b.kind = Kind::Bins;
  b.degree_or_bins = count;
  b.increment_features = increment_features;
  return b;
}

std::size_t RegressionBasis::feature_count(std::size_t dims) const {
  if (kind == Kind::Bins) return static_cast<std::size_t>(degree_or_bins);
  return multi_indices(dims, degree_or_bins).size();
}

int bin_index(double x, double lo, double hi, int bins) {
  if (bins <= 1 || !(hi > lo)) return 0;
  const double u = (x - lo) / (hi - lo) * bins;
  if (!(u > 0.0)) return 0;
  if (u >= bins) return bins - 1;
  return static_cast<int>(u);
}

std::vector<double> RegressionBasis::feature_map(
    double t, std::span<const double> b) const {
  if (kind == Kind::Bins) {
    require(bin_range.has_value(), ErrorKind::InvalidArgument,
            "bin feature map needs a range");
    std::vector<double> out(static_cast<std::size_t>(degree_or_bins), 0.0);
    out[bin_index(b[0], bin_range->first, bin_range->second, degree_or_bins)] =
        1.0;
    return out;
  }
  const double scale = t > 0.0 ? std::sqrt(t) : 1.0;
  const auto mi = multi_indices(b.size(), degree_or_bins);
  std::vector<std::vector<double>> h(b.size(),
                                     std::vector<double>(degree_or_bins + 1));
  for (std::size_t k = 0; k < b.size(); ++k)
    hermite(b[k] / scale, degree_or_bins, h[k].data());
  std::vector<double> out(mi.size(), 1.0);
  for (std::size_t m = 0; m < mi.size(); ++m)
    for (std::size_t k = 0; k < b.size(); ++k) out[m] *= h[k][mi[m][k]];
  return out;
}

Eigen::MatrixXd design_matrix(const RegressionBasis& basis, double t,
                              std::span<const double> states,
                              std::size_t dims) {
  require(dims >= 1 && states.size() % dims == 0, ErrorKind::InvalidArgument,
          "state array does not match the dimension");
  const std::size_t rows = states.size() / dims;
  const std::size_t cols = basis.feature_count(dims);
  Eigen::MatrixXd x(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto f = basis.feature_map(t, states.subspan(i * dims, dims));
    for (std::size_t c = 0; c < cols; ++c) x(i, c) = f[c];
  }
  return x;
}

RegressionFit regress_conditional(std::span<const double> targets,
                                  const Eigen::MatrixXd& features) {
  require(!targets.empty() && features.rows() > 0 && features.cols() > 0,
          ErrorKind::InvalidArgument, "regression needs non-empty input");
  require(static_cast<Eigen::Index>(targets.size()) == features.rows(),
          ErrorKind::InvalidArgument,
          "target count does not match feature rows");
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(),
                                            static_cast<Eigen::Index>(
                                                targets.size()));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(features);
  RegressionFit fit;
  fit.coefficients = cod.solve(y);
  const Eigen::VectorXd f = features * fit.coefficients;
  fit.fitted.assign(f.data(), f.data() + f.size());
  return fit;
}

StepProjector::StepProjector(const RegressionBasis& basis,
                             const PathBundle& bundle, std::size_t step)
    : basis_(basis),
      bundle_(bundle),
      step_(step),
      t_(bundle.grid().node(step)),
      dt_(bundle.grid().dt(step)),
      scale_(t_ > 0.0 ? std::sqrt(t_) : 1.0),
      dims_(bundle.dims()) {
  require(step < bundle.steps(), ErrorKind::InvalidArgument,
          "projector step out of range");
  const std::size_t m = bundle.count();
  std::size_t ngroups = 1;
  if (basis_.kind == RegressionBasis::Kind::Polynomial) {
    multi_indices_ = multi_indices(dims_, basis_.degree_or_bins);
    nphi_ = multi_indices_.size();
  } else {
    nphi_ = 1;
    nbins_ = basis_.degree_or_bins;
    const auto pos = bundle.positions_at(step);
    if (basis_.bin_range) {
      bin_lo_ = basis_.bin_range->first;
      bin_hi_ = basis_.bin_range->second;
    } else {
      bin_lo_ = bin_hi_ = pos[0];
      for (std::size_t i = 0; i < m; ++i) {
        bin_lo_ = std::min(bin_lo_, pos[i * dims_]);
        bin_hi_ = std::max(bin_hi_, pos[i * dims_]);
      }
    }
    if (!(bin_hi_ - bin_lo_ > 1e-12)) nbins_ = 1;
    groups_.resize(m);
    for (std::size_t i = 0; i < m; ++i)
      groups_[i] = bin_index(pos[i * dims_], bin_lo_, bin_hi_, nbins_);
    ngroups = static_cast<std::size_t>(nbins_);
  }
  const std::size_t w = row_width();
  std::vector<Eigen::MatrixXd> gram(ngroups, Eigen::MatrixXd::Zero(w, w));
  std::vector<double> phi(nphi_), row(w);
  for (std::size_t i = 0; i < m; ++i) {
    state_features(i, phi.data());
    full_row(i, phi.data(), row.data());
    Eigen::Map<Eigen::VectorXd> r(row.data(), static_cast<Eigen::Index>(w));
    gram[group_of(i)].selfadjointView<Eigen::Lower>().rankUpdate(r);
  }
  pinv_.resize(ngroups);
  for (std::size_t g = 0; g < ngroups; ++g) {
    Eigen::MatrixXd full = gram[g].selfadjointView<Eigen::Lower>();
    pinv_[g] = pseudo_inverse_sym(full);
  }
  parameters_ = w * ngroups;
}

std::size_t StepProjector::row_width() const {
  return basis_.increment_features ? nphi_ * (1 + 2 * dims_) : nphi_;
}

std::size_t StepProjector::group_of(std::size_t path) const {
  return groups_.empty() ? 0 : static_cast<std::size_t>(groups_[path]);
}

void StepProjector::state_features(std::size_t path, double* out) const {
  if (basis_.kind == RegressionBasis::Kind::Bins) {
    out[0] = 1.0;
    return;
  }
  const auto b = bundle_.position(step_, path);
  const int deg = basis_.degree_or_bins;
  const std::size_t need = dims_ * static_cast<std::size_t>(deg + 1);
  double stack[128];
  std::vector<double> heap(need > 128 ? need : 0);
  double* hk = need > 128 ? heap.data() : stack;
  for (std::size_t k = 0; k < dims_; ++k)
    hermite(b[k] / scale_, deg, hk + k * (deg + 1));
  for (std::size_t m = 0; m < nphi_; ++m) {
    double v = 1.0;
    for (std::size_t k = 0; k < dims_; ++k)
      v *= hk[k * (deg + 1) + multi_indices_[m][k]];
    out[m] = v;
  }
}

void StepProjector::full_row(std::size_t path, const double* phi,
                             double* out) const {
  for (std::size_t m = 0; m < nphi_; ++m) out[m] = phi[m];
  if (!basis_.increment_features) return;
  const auto db = bundle_.increment(step_, path);
  const double sd = std::sqrt(dt_);
  for (std::size_t l = 0; l < dims_; ++l) {
    const double u = db[l] / sd;
    const double u2 = (u * u - 1.0) / std::sqrt(2.0);
    for (std::size_t m = 0; m < nphi_; ++m) {
      out[(1 + l) * nphi_ + m] = phi[m] * u;
      out[(1 + dims_ + l) * nphi_ + m] = phi[m] * u2;
    }
  }
}

double StepProjector::project(std::span<const double> target,
                              std::span<double> mean,
                              std::span<double> z) const {
  const std::size_t m = bundle_.count();
  require(target.size() == m && mean.size() == m, ErrorKind::InvalidArgument,
          "projection target size mismatch");
  const bool want_z = !z.empty();
  require(!want_z || z.size() == m * dims_, ErrorKind::InvalidArgument,
          "projection z buffer size mismatch");
  const std::size_t w = row_width();
  const std::size_t ngroups = pinv_.size();
  // In plain mode the z estimate needs one extra right-hand side per
  // coordinate.
  const std::size_t nrhs =
      (!basis_.increment_features && want_z) ? 1 + dims_ : 1;
  std::vector<Eigen::MatrixXd> rhs(ngroups, Eigen::MatrixXd::Zero(w, nrhs));
  std::vector<double> phi(nphi_), row(w);
  for (std::size_t i = 0; i < m; ++i) {
    state_features(i, phi.data());
    full_row(i, phi.data(), row.data());
    Eigen::MatrixXd& r = rhs[group_of(i)];
    const double y = target[i];
    for (std::size_t c = 0; c < w; ++c) r(c, 0) += row[c] * y;
    if (nrhs > 1) {
      const auto db = bundle_.increment(step_, i);
      for (std::size_t l = 0; l < dims_; ++l) {
        const double yz = y * db[l] / dt_;
        for (std::size_t c = 0; c < w; ++c) r(c, 1 + l) += row[c] * yz;
      }
    }
  }
  std::vector<Eigen::MatrixXd> coef(ngroups);
  for (std::size_t g = 0; g < ngroups; ++g) coef[g] = pinv_[g] * rhs[g];

  const double sd = std::sqrt(dt_);
  double sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    state_features(i, phi.data());
    full_row(i, phi.data(), row.data());
    const Eigen::MatrixXd& c = coef[group_of(i)];
    double fit_full = 0.0;
    for (std::size_t k = 0; k < w; ++k) fit_full += row[k] * c(k, 0);
    double mu = 0.0;
    for (std::size_t k = 0; k < nphi_; ++k) mu += phi[k] * c(k, 0);
    mean[i] = mu;
    const double res = target[i] - fit_full;
    sq += res * res;
    if (!want_z) continue;
    for (std::size_t l = 0; l < dims_; ++l) {
      double zl = 0.0;
      if (basis_.increment_features) {
        for (std::size_t k = 0; k < nphi_; ++k)
          zl += phi[k] * c((1 + l) * nphi_ + k, 0);
        zl /= sd;
      } else {
        for (std::size_t k = 0; k < nphi_; ++k) zl += phi[k] * c(k, 1 + l);
      }
      z[i * dims_ + l] = zl;
    }
  }
  return std::sqrt(sq / static_cast<double>(m));
}

}  // namespace bsde
