#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bsde/generators.hpp"
#include "bsde/moments.hpp"

namespace bsde {

struct CloudPoint {
  double t = 0.0;
  std::vector<double> b;  // B_t, fed to path-dependent terms
  double y1 = 0.0;
  std::vector<double> z1;
  double y2 = 0.0;
  std::vector<double> z2;
  double theta = 0.5;
};

enum class CloudStrategy { Grid, Random, AdversarialCorner };

std::string to_string(CloudStrategy s);
CloudStrategy parse_cloud_strategy(const std::string& s);

struct CloudOptions {
  std::size_t dims = 1;
  double horizon = 1.0;
  double y_range = 10.0;
  double z_range = 10.0;
  double b_range = 3.0;
  double z_large = 25.0;  // |z| used at the adversarial corners
};

struct SampleCloud {
  std::vector<CloudPoint> points;
  CloudStrategy strategy = CloudStrategy::Random;
  std::uint64_t seed = 0;
  CloudOptions options;
};

// Grid and random clouds have exactly `count` points. The adversarial cloud
// always holds the full corner set, topped up with random points to `count`.
SampleCloud make_cloud(CloudStrategy strategy, std::size_t count,
                       std::uint64_t seed, const CloudOptions& options = {});
// (y, z) -> (-y, -z) on every point; t, b and theta unchanged.
SampleCloud reflect_cloud(const SampleCloud& cloud);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct Witness {
  CloudPoint point;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::string detail;  // which sub-check produced it
};

struct ConditionReport {
  std::string condition;
  std::string generator;
  Verdict verdict = Verdict::Inconclusive;
  double worst_margin = 0.0;       // min over samples of rhs - lhs
  std::vector<Witness> witnesses;  // at most kMaxWitnesses, worst first
  std::size_t samples_used = 0;
  std::size_t failures = 0;
  std::size_t non_finite = 0;

  static constexpr std::size_t kMaxWitnesses = 10;
};

// A sample fails when rhs - lhs < -kConditionTol * (1 + |rhs|).
inline constexpr double kConditionTol = 1e-9;

std::string format_report(const ConditionReport& r);

// Accumulates (lhs, rhs) pairs into a report, keeping the worst witnesses.
class ReportBuilder {
 public:
  ReportBuilder(std::string condition, std::string generator);
  // One sample may feed several sub-checks; count it once.
  void sample() { ++r_.samples_used; }
  void add(const CloudPoint& p, double lhs, double rhs,
           const std::string& detail = "");
  ConditionReport finish();

 private:
  ConditionReport r_;
};

enum class GrowthCondition { EX1, EX1prime, EX2, A1, A5 };
enum class YCondition { A2i, A2ii, MonotoneLimit };
enum class ZCondition { A3i, A3ii, A4, A6i, A6ii };
enum class ThetaCondition { UNi, UNii, UNprimei, UNprimeii };

ConditionReport check_growth(const Generator& g, GrowthCondition which,
                             const SampleCloud& cloud);
ConditionReport check_y_regularity(const Generator& g, YCondition which,
                                   const SampleCloud& cloud);
ConditionReport check_z_regularity(const Generator& g, ZCondition which,
                                   const SampleCloud& cloud);
ConditionReport check_theta_convexity(const Generator& g,
                                      ThetaCondition which,
                                      const SampleCloud& cloud);
// |g| <= u(t); only meaningful for truncated (bounded) generators.
ConditionReport check_bounded(const Generator& g, const TimeFunction& u,
                              const SampleCloud& cloud);

// Ids: EX1 EX1prime EX2 A1 A5 A2i A2ii monotone-limit A3i A3ii A4 A6i A6ii
// UN-i UN-ii UNprime-i UNprime-ii.
const std::vector<std::string>& condition_catalog();
ConditionReport check_condition(const Generator& g, const std::string& id,
                                const SampleCloud& cloud);

// Growth implied by the extended convexity with y1=y2, z1=z2:
// 1_{y>0} g <= f + 2 beta |y| + k gamma |z|^alpha (variant i), mirrored for ii.
struct GrowthFit {
  double k = 0.0;               // sup of the implied ratio over the cloud
  bool finite = true;           // false if a z=0 sample already violates
  std::size_t samples_used = 0;
};
GrowthFit fit_growth_constant(const Generator& g, const SampleCloud& cloud,
                              bool variant_ii = false);
ConditionReport check_un_growth(const Generator& g, const SampleCloud& cloud,
                                double k, bool variant_ii = false);

// One-sided derivative by difference quotients at step h, with a
// Richardson extrapolation when the h and 2h quotients disagree.
double one_sided_derivative(const std::function<double(double)>& fn, double x,
                            bool right, double h = 1e-6);

}  // namespace bsde
