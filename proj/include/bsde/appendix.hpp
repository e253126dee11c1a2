#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsde/conditions.hpp"

namespace bsde {

// Scalar test function with the hypotheses it declares.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> eval;
  // Nondecreasing growth envelope on R+ with |f(x)| <= phi(|x|).
  std::function<double(double)> phi;

  // Monotone on R- with constant k1, Lipschitz on R+ with constant k2.
  std::optional<double> k1, k2;
  // Band half-width and Lipschitz constant: on [-a, a] for the convex-ray
  // hypotheses, on all of R for the monotone-ray hypotheses.
  std::optional<double> a, k;
  bool convex_rays = false;    // convex on (-inf,-a] and [a,inf)
  bool monotone_rays = false;  // decreasing on (-inf,-a], increasing on [a,inf)
  // Declared one-sided derivatives f'_-(-a), f'_+(a); estimated when absent.
  std::optional<double> left_derivative, right_derivative;

  double operator()(double x) const { return eval(x); }
};

enum class LemmaId { A1, A2, A3 };
std::string to_string(LemmaId id);
LemmaId parse_lemma(const std::string& s);

struct EnvelopeConstruction {
  LemmaId lemma = LemmaId::A2;
  double a = 0.0;
  double k = 0.0;
  double k0 = 0.0;
  double x0 = 0.0;     // kink of g; zero for the monotone-ray construction
  double sup_f = 0.0;  // upper bound of sup |f| on [-a, a]
  double M = 0.0;      // bound on |h|
  bool mirrored = false;
  std::function<double(double)> f, g, gbar, gbar1, gbar2, h;
};

struct ShiftedEnvelope {
  std::function<double(double)> gbar, gbar1, gbar2;
};

// gbar(x) = g(x + x0) - g(x0); gbar1 = gbar on R+, -k0 x on R-;
// gbar2 = gbar on R-, k0 x on R+.
ShiftedEnvelope construct_A2_shift(const std::function<double(double)>& g,
                                   double x0, double k0);

// Envelope for convex-ray functions: f outside (-a, a), a tent with slopes
// +-k0 inside, peak at x0 = (f(a) - f(-a)) / (2 k0).
EnvelopeConstruction construct_A2_envelope(const ScalarFunction& f);
// Envelope for monotone-ray functions: f outside (-a, a); inside, the line
// from f(-a) down to the lower endpoint value, then flat.
EnvelopeConstruction construct_A3_envelope(const ScalarFunction& f);

// Upper bound of sup |f| on [-a, a] from a dense grid plus the Lipschitz
// correction k * spacing / 2.
double band_sup(const std::function<double(double)>& f, double a, double k);

struct LemmaSample {
  double x1 = 0.0;
  double x2 = 0.0;
  double theta = 0.5;
};

// Uniform samples over a window scaled to the band, a share with theta
// close to 1, and corner samples at the knots.
std::vector<LemmaSample> lemma_samples(std::size_t count, std::uint64_t seed,
                                       double a);

struct LemmaReport {
  LemmaId lemma = LemmaId::A1;
  std::string family;
  std::optional<EnvelopeConstruction> construction;
  // Main inequality first, then the intermediate ones.
  std::vector<ConditionReport> checks;

  const ConditionReport& main() const { return checks.front(); }
  const ConditionReport* find(const std::string& id) const;
  bool all_pass() const;
};

std::string format_lemma_report(const LemmaReport& r);

// Each check validates the declared hypotheses first and throws
// InvalidHypothesis with a witness when they fail on the test grid.
LemmaReport lemmaA1_check(const ScalarFunction& f, double k1, double k2,
                          const std::vector<LemmaSample>& samples);
LemmaReport lemmaA2_check(const ScalarFunction& f,
                          const std::vector<LemmaSample>& samples,
                          bool intermediates = true);
LemmaReport lemmaA3_check(const ScalarFunction& f,
                          const std::vector<LemmaSample>& samples,
                          bool intermediates = true);

// h = 0 off the band, |h| <= M, and the theta-split bound on h.
ConditionReport remainder_check(const EnvelopeConstruction& c,
                                const std::vector<LemmaSample>& samples);

// Second differences f(x-s) - 2 f(x) + f(x+s) >= -tol on `nodes` points of
// [lo, hi]; returns the most negative value (>= 0 when convex).
double min_second_difference(const std::function<double(double)>& f,
                             double lo, double hi, std::size_t nodes);

void validate_hypotheses(const ScalarFunction& f, LemmaId lemma);

// Fixed test families per lemma, then seeded random admissible functions.
const std::vector<std::string>& lemma_family_catalog(LemmaId lemma);
ScalarFunction lemma_family(LemmaId lemma, const std::string& id,
                            std::uint64_t seed = 0);
ScalarFunction random_admissible(LemmaId lemma, std::uint64_t seed);
// Convex-ray family with one concave ray, for falsification tests.
ScalarFunction random_concave_ray(std::uint64_t seed);

}  // namespace bsde
