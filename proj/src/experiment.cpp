#include "bsde/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bsde/error.hpp"
#include "bsde/format.hpp"
#include "bsde/rng.hpp"

namespace bsde {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

// Reads typed values out of a ptree, recording errors instead of throwing.
class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& errors)
      : tree_(tree), errors_(errors) {}

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <class T>
  void number(const std::string& key, T& out) {
    auto s = text(key);
    if (!s) return;
    try {
      std::size_t used = 0;
      double v = std::stod(*s, &used);
      if (used != s->size()) throw std::invalid_argument("trailing text");
      if constexpr (std::is_integral_v<T>) {
        if (v != std::floor(v) || v < 0)
          throw std::invalid_argument("not a nonnegative integer");
      }
      out = static_cast<T>(v);
    } catch (const std::exception&) {
      errors_.push_back("malformed number for " + key + ": '" + *s + "'");
    }
  }

  template <class F>
  void with(const std::string& key, F&& fn) {
    auto s = text(key);
    if (!s) return;
    try {
      fn(*s);
    } catch (const Error& e) {
      errors_.push_back(key + ": " + e.what());
    }
  }

  void unknown_keys() {
    for (const auto& [section, body] : tree_) {
      if (body.empty()) {
        errors_.push_back("key outside a section: " + section);
        continue;
      }
      for (const auto& [key, v] : body) {
        (void)v;
        if (!used_.count(section + "." + key))
          errors_.push_back("unknown key [" + section + "] " + key);
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

void read_problem(Reader& r, const std::string& sec, ProblemSpec& p) {
  auto& g = p.generator;
  if (auto s = r.text(sec + ".generator")) g.id = *s;
  r.number(sec + ".alpha", g.alpha);
  r.number(sec + ".dims", g.dims);
  r.with(sec + ".beta", [&](const std::string& s) { g.beta = parse_time_function(s); });
  r.with(sec + ".gamma", [&](const std::string& s) { g.gamma = parse_time_function(s); });
  if (auto s = r.text(sec + ".expression")) g.expression = *s;
  if (auto s = r.text(sec + ".f")) g.f_process = *s;
  r.number(sec + ".linear_b", g.linear_b);
  r.number(sec + ".linear_c", g.linear_c);
  if (auto s = r.text(sec + ".terminal")) p.terminal = *s;
}

void problem_errors(const ProblemSpec& p, const std::string& sec,
                    std::vector<std::string>& errors) {
  const auto& cat = generator_catalog();
  if (std::find(cat.begin(), cat.end(), p.generator.id) == cat.end())
    errors.push_back("[" + sec + "] unknown generator '" + p.generator.id +
                     "' (catalog: " + join(cat, ", ") + ")");
  if (!(p.generator.alpha > 1.0 && p.generator.alpha < 2.0))
    errors.push_back("[" + sec + "] alpha must lie in (1,2), got " +
                     fmt_num(p.generator.alpha));
  if (p.generator.dims < 1)
    errors.push_back("[" + sec + "] dims must be >= 1");
  if (p.generator.id == "custom-expression" && p.generator.expression.empty())
    errors.push_back("[" + sec + "] custom-expression needs an expression");
  try {
    make_terminal(p.terminal);
  } catch (const Error& e) {
    errors.push_back("[" + sec + "] terminal: " + e.what());
  }
  if (errors.empty()) {
    try {
      make_generator(p.generator);
    } catch (const Error& e) {
      errors.push_back("[" + sec + "] generator: " + e.what());
    }
  }
}

bool known_check(const std::string& id) {
  const auto& cond = condition_catalog();
  const auto& bounds = bound_catalog();
  if (std::find(cond.begin(), cond.end(), id) != cond.end()) return true;
  if (std::find(bounds.begin(), bounds.end(), id) != bounds.end()) return true;
  return id == "ladder" || id == "uniqueness" || id == "lemma:A1" ||
         id == "lemma:A2" || id == "lemma:A3";
}

std::string problem_text(const ProblemSpec& p) {
  const auto& g = p.generator;
  std::ostringstream os;
  os << "generator = " << g.id << "\n";
  os << "alpha = " << fmt_num(g.alpha) << "\n";
  os << "dims = " << g.dims << "\n";
  os << "beta = " << g.beta.description() << "\n";
  os << "gamma = " << g.gamma.description() << "\n";
  if (!g.expression.empty()) os << "expression = " << g.expression << "\n";
  if (!g.f_process.empty()) os << "f = " << g.f_process << "\n";
  if (g.id == "linear")
    os << "linear_b = " << fmt_num(g.linear_b) << "\nlinear_c = "
       << fmt_num(g.linear_c) << "\n";
  os << "terminal = " << p.terminal << "\n";
  return os.str();
}

double sup_gap(const SolutionField& a, const SolutionField& b, bool z) {
  double gap = 0.0;
  const std::size_t m = a.count(), n = a.steps();
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      if (!z) {
        gap = std::max(gap, std::abs(a.Y(j, i) - b.Y(j, i)));
      } else if (j < n) {
        const auto za = a.Z(j, i), zb = b.Z(j, i);
        for (std::size_t k = 0; k < za.size(); ++k)
          gap = std::max(gap, std::abs(za[k] - zb[k]));
      }
    }
  return gap;
}

std::string verdict_word(BoundVerdict v) { return to_string(v); }

CheckOutcome condition_outcome(const ConditionReport& r) {
  CheckOutcome o;
  o.id = r.condition;
  o.kind = "condition";
  o.verdict = to_string(r.verdict);
  o.violated = r.verdict == Verdict::Fail;
  o.detail = format_report(r);
  return o;
}

std::string csv_file_name(const std::string& id) {
  std::string s = "bound_";
  for (char c : id) s += (c == '.' || c == ':') ? '_' : c;
  return s + ".csv";
}

}  // namespace

const std::vector<std::string>& bound_catalog() {
  static const std::vector<std::string> ids = {"3.2", "remark3.2", "3.3",
                                               "comparison", "4.6"};
  return ids;
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  problem_errors(c.problem, "problem", errors);
  if (c.prime) problem_errors(*c.prime, "prime", errors);
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon))
    errors.push_back("horizon must be positive and finite");
  if (c.steps < 1) errors.push_back("steps must be >= 1");
  if (c.paths < 1) errors.push_back("paths must be >= 1");
  if (c.basis != "poly" && c.basis != "bins")
    errors.push_back("basis must be poly or bins, got '" + c.basis + "'");
  if (c.degree < 0 || (c.basis == "bins" && c.degree < 1))
    errors.push_back("degree must be >= 0 (>= 1 for bins)");
  if ((c.ladder_n > 0) != (c.ladder_q > 0))
    errors.push_back("ladder needs both n_max and q_max");
  if (!(c.p > 1.0)) errors.push_back("p must exceed 1");
  for (const auto& id : c.checks) {
    if (!known_check(id)) {
      errors.push_back("unknown check '" + id + "' (conditions: " +
                       join(condition_catalog(), ", ") + "; bounds: " +
                       join(bound_catalog(), ", ") +
                       "; also ladder, uniqueness, lemma:A1|A2|A3)");
    }
    if (id == "ladder" && c.ladder_n <= 0)
      errors.push_back("check 'ladder' needs [solver] ladder = n_max q_max");
  }
  return errors;
}

namespace {

// Drops "; ..." and "# ..." after whitespace; read_ini only knows whole-line
// comments.
std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(strip_inline_comments(text));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Configuration,
         "config syntax: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::vector<std::string> errors;
  Reader r(tree, errors);
  ExperimentConfig c;
  read_problem(r, "problem", c.problem);
  if (tree.get_child_optional("prime")) {
    ProblemSpec p = c.problem;  // unset keys inherit from [problem]
    read_problem(r, "prime", p);
    c.prime = p;
  }
  r.number("grid.horizon", c.horizon);
  r.number("grid.steps", c.steps);
  r.with("grid.scheme", [&](const std::string& s) {
    if (s == "uniform") c.scheme = GridScheme::Uniform;
    else if (s == "geometric") c.scheme = GridScheme::Geometric;
    else fail(ErrorKind::Configuration, "scheme must be uniform or geometric");
  });
  r.number("grid.ratio", c.ratio);
  r.number("grid.paths", c.paths);
  r.number("grid.seed", c.seed);
  if (auto s = r.text("solver.basis")) c.basis = *s;
  r.number("solver.degree", c.degree);
  r.with("solver.ladder", [&](const std::string& s) {
    const auto parts = split_list(s);
    if (parts.size() != 2)
      fail(ErrorKind::Configuration, "ladder needs 'n_max q_max'");
    std::size_t u1 = 0, u2 = 0;
    try {
      c.ladder_n = std::stoi(parts[0], &u1);
      c.ladder_q = std::stoi(parts[1], &u2);
    } catch (const std::exception&) {
      u1 = 0;
    }
    if (u1 != parts[0].size() || u2 != parts[1].size())
      fail(ErrorKind::Configuration, "malformed ladder '" + s + "'");
  });
  if (auto s = r.text("checks.list")) c.checks = split_list(*s);
  r.number("checks.p", c.p);
  r.with("checks.cloud", [&](const std::string& s) { c.cloud = parse_cloud_strategy(s); });
  r.number("checks.cloud_samples", c.cloud_samples);
  r.number("checks.lemma_samples", c.lemma_samples);
  r.number("checks.uniqueness_tol", c.uniqueness_tol);
  if (auto s = r.text("output.dir")) c.out_dir = *s;
  r.unknown_keys();

  if (errors.empty())
    for (auto& e : validate_config(c)) errors.push_back(std::move(e));
  if (!errors.empty())
    fail(ErrorKind::Configuration,
         std::to_string(errors.size()) + " configuration error(s):\n  " +
             join(errors, "\n  "));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Configuration,
          "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[problem]\n" << problem_text(c.problem);
  if (c.prime) os << "\n[prime]\n" << problem_text(*c.prime);
  os << "\n[grid]\n";
  os << "horizon = " << fmt_num(c.horizon) << "\n";
  os << "steps = " << c.steps << "\n";
  os << "scheme = " << (c.scheme == GridScheme::Uniform ? "uniform" : "geometric")
     << "\n";
  if (c.scheme == GridScheme::Geometric) os << "ratio = " << fmt_num(c.ratio) << "\n";
  os << "paths = " << c.paths << "\n";
  os << "seed = " << c.seed << "\n";
  os << "\n[solver]\n";
  os << "basis = " << c.basis << "\n";
  os << "degree = " << c.degree << "\n";
  if (c.ladder_n > 0) os << "ladder = " << c.ladder_n << " " << c.ladder_q << "\n";
  os << "\n[checks]\n";
  os << "list = " << join(c.checks, ", ") << "\n";
  os << "p = " << fmt_num(c.p) << "\n";
  os << "cloud = " << to_string(c.cloud) << "\n";
  os << "cloud_samples = " << c.cloud_samples << "\n";
  os << "lemma_samples = " << c.lemma_samples << "\n";
  os << "uniqueness_tol = " << fmt_num(c.uniqueness_tol) << "\n";
  return os.str();
}

PathBundle experiment_paths(const ExperimentConfig& c, std::size_t dims) {
  const TimeGrid grid = build_grid(c.horizon, c.steps, c.scheme, c.ratio);
  return sample_paths(grid, dims, c.paths, derive_seed(c.seed, "paths"));
}

RegressionBasis experiment_basis(const ExperimentConfig& c) {
  if (c.basis == "bins") return RegressionBasis::bins(c.degree);
  return RegressionBasis::polynomial(c.degree, true);
}

SolutionField solve_problem(const ExperimentConfig& c, const ProblemSpec& p,
                            const PathBundle& bundle, LadderResult* ladder) {
  const Generator g = make_generator(p.generator);
  const TerminalData xi = make_terminal(p.terminal);
  if (c.ladder_n > 0) {
    // The ladder uses the plain increment estimator; its weights keep the
    // truncated schemes monotone.
    RegressionBasis basis = experiment_basis(c);
    basis.increment_features = false;
    LadderResult res =
        solve_ladder(g, xi, bundle, basis, c.ladder_n, c.ladder_q);
    SolutionField sol = res.final;
    if (ladder) *ladder = std::move(res);
    return sol;
  }
  return solve_bounded(g, xi, bundle, experiment_basis(c));
}

CheckOutcome run_bound_check(const ExperimentConfig& c, const std::string& id,
                             const Generator& g, const SolutionField& sol,
                             const PathBundle& bundle) {
  const auto& prof = g.profile();
  const TerminalData xi = make_terminal(c.problem.terminal);
  CheckOutcome o;
  o.id = id;
  o.kind = "bound";
  o.csv_name = csv_file_name(id);
  auto finish = [&](const BoundCheckResult& r) {
    o.verdict = verdict_word(r.verdict);
    o.violated = r.verdict == BoundVerdict::Violated;
    std::ostringstream os;
    os << "worst_margin: " << fmt_num(r.worst_margin) << "\n";
    if (id == "comparison")
      os << "violations: " << r.violations << "/" << r.comparisons
         << "\nviolation_fraction: " << fmt_num(r.violation_fraction) << "\n";
    o.detail = os.str();
    o.csv = bound_csv(r);
  };

  if (id == "3.2" || id == "remark3.2" || id == "3.3") {
    const ConstantSet cs(prof.alpha, c.horizon, prof.beta, prof.gamma);
    if (id == "3.3")
      finish(verify_sup_bound(sol, cs, xi, prof.f, c.p));
    else
      finish(verify_pointwise_bound(
          sol, cs, xi, prof.f,
          id == "3.2" ? PointwiseVariant::TwoSided : PointwiseVariant::OneSided));
    return o;
  }
  if (id == "comparison") {
    require(c.prime.has_value(), ErrorKind::Configuration,
            "comparison check needs a [prime] section");
    const SolutionField other = solve_problem(c, *c.prime, bundle);
    try {
      finish(verify_comparison(sol, other));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PreconditionViolation) throw;
      o.verdict = "precondition-violation";
      o.violated = true;
      o.detail = std::string("message: ") + e.what() + "\n";
      o.csv_name.clear();
    }
    return o;
  }
  if (id == "4.6") {
    // Moment of the modified process along the prime solution when present.
    std::optional<SolutionField> other;
    if (c.prime) other = solve_problem(c, *c.prime, bundle);
    const SolutionField& ref = other ? *other : sol;
    const Generator& gp = other ? make_generator(c.prime->generator) : g;
    const auto& pp = gp.profile();
    const auto fh = fhat_process(pp, ref);
    const double astar = conjugate_exponent(pp.alpha);
    const auto gamma = pp.un_or_growth().gamma;
    std::optional<JensenInputs> jensen;
    if (gamma.integral(c.horizon) > 0.0) jensen = JensenInputs{gamma, &ref};
    const auto res =
        verify_fhat_moment(fh, ref.grid(), ref.count(), c.p, astar, jensen);
    const bool finite = std::isfinite(res.fhat.log_mean) && !res.fhat.overflow;
    o.verdict = !res.consistent ? "violated"
                : finite        ? "satisfied"
                                : "indeterminate";
    o.violated = !res.consistent;
    std::ostringstream os;
    os << "log_moment: " << fmt_num(res.fhat.log_mean)
       << "\nrel_se: " << fmt_num(res.fhat.rel_se)
       << "\nheavy_tail: " << (res.fhat.heavy_tail ? 1 : 0) << "\n";
    if (res.log_term)
      os << "log_term: " << fmt_num(res.log_term->log_mean)
         << "\njensen_majorant: " << fmt_num(res.jensen_majorant->log_mean)
         << "\njensen_consistent: " << (res.consistent ? 1 : 0) << "\n";
    o.detail = os.str();
    o.csv_name.clear();
    return o;
  }
  fail(ErrorKind::Configuration, "unknown bound '" + id + "'");
}

bool ReportDocument::any_violation() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const CheckOutcome& c) { return c.violated; });
}

std::string ReportDocument::text() const {
  std::ostringstream os;
  os << "== config ==\n" << config_echo << "\n== constants ==\n" << constants;
  os << "\n== solver ==\n" << solver_summary;
  for (const auto& c : checks) {
    os << "\n== check " << c.id << " ==\nkind: " << c.kind
       << "\nverdict: " << c.verdict << "\n";
    if (!c.csv_name.empty()) os << "csv: " << c.csv_name << "\n";
    os << c.detail;
  }
  if (!errors.empty()) {
    os << "\n== errors ==\n";
    for (const auto& e : errors) os << e << "\n";
  }
  os << "\n== result ==\nviolations: " << (any_violation() ? "yes" : "no") << "\n";
  return os.str();
}

int exit_code_for(const ReportDocument& doc) {
  if (!doc.errors.empty()) return kExitInternal;
  return doc.any_violation() ? kExitViolation : kExitOk;
}

ReportDocument run_experiment(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ReportDocument doc;
  doc.config_echo = config_text(c);
  const Generator g = make_generator(c.problem.generator);
  const auto& prof = g.profile();
  doc.constants = ConstantSet(prof.alpha, c.horizon, prof.beta, prof.gamma).dump(c.p);

  const auto& cond = condition_catalog();
  bool needs_solution = false;
  for (const auto& id : c.checks) {
    if (std::find(cond.begin(), cond.end(), id) != cond.end()) {
      CloudOptions opt;
      opt.dims = c.problem.generator.dims;
      opt.horizon = c.horizon;
      const auto cloud = make_cloud(c.cloud, c.cloud_samples,
                                    derive_seed(c.seed, "cloud"), opt);
      try {
        doc.checks.push_back(condition_outcome(check_condition(g, id, cloud)));
      } catch (const Error& e) {
        CheckOutcome o{id, "condition", "error", false, std::string("message: ") + e.what() + "\n", "", ""};
        doc.errors.push_back(id + ": " + e.what());
        doc.checks.push_back(std::move(o));
      }
    } else if (id.rfind("lemma:", 0) == 0) {
      const LemmaId lemma = parse_lemma(id.substr(6));
      CheckOutcome o;
      o.id = id;
      o.kind = "lemma";
      std::ostringstream os;
      std::size_t failed = 0;
      for (const auto& fam : lemma_family_catalog(lemma)) {
        const auto f = lemma_family(lemma, fam, derive_seed(c.seed, "lemma"));
        const auto s = lemma_samples(c.lemma_samples, derive_seed(c.seed, "lemma-sweep"),
                                     f.a.value_or(1.0));
        const LemmaReport r = lemma == LemmaId::A1   ? lemmaA1_check(f, *f.k1, *f.k2, s)
                              : lemma == LemmaId::A2 ? lemmaA2_check(f, s)
                                                     : lemmaA3_check(f, s);
        if (!r.all_pass()) ++failed;
        os << format_lemma_report(r);
      }
      o.verdict = failed == 0 ? "pass" : "fail";
      o.violated = failed > 0;
      o.detail = "families_failing: " + std::to_string(failed) + "\n" + os.str();
      doc.checks.push_back(std::move(o));
    } else {
      needs_solution = true;
    }
  }

  if (needs_solution || c.checks.empty()) {
    try {
      const PathBundle bundle = experiment_paths(c, c.problem.generator.dims);
      LadderResult ladder;
      const SolutionField sol = solve_problem(c, c.problem, bundle, &ladder);
      doc.summary_csv = summary_csv(summarize(sol));
      std::ostringstream ss;
      ss << "method: " << sol.method << "\npaths: " << sol.count()
         << "\nsteps: " << sol.steps() << "\nY0_mean: "
         << fmt_num(summarize(sol).front().y_mean) << "\n";
      double worst_res = 0.0;
      for (double r : sol.residual_rms) worst_res = std::max(worst_res, r);
      ss << "max_residual_rms: " << fmt_num(worst_res) << "\n";
      doc.solver_summary = ss.str();

      for (const auto& id : c.checks) {
        if (std::find(cond.begin(), cond.end(), id) != cond.end() ||
            id.rfind("lemma:", 0) == 0)
          continue;
        try {
          if (id == "ladder") {
            CheckOutcome o;
            o.id = id;
            o.kind = "ladder";
            bool gaps_down = true;
            for (std::size_t k = 2; k < ladder.diagonal_gaps.size(); ++k)
              gaps_down = gaps_down && ladder.diagonal_gaps[k] < ladder.diagonal_gaps[k - 1];
            const bool ok = ladder.violation_fraction <= 0.005 && gaps_down;
            o.verdict = ok ? "satisfied" : "violated";
            o.violated = !ok;
            std::ostringstream os, csv;
            os << "violations: " << ladder.violations << "/" << ladder.comparisons
               << "\nviolation_fraction: " << fmt_num(ladder.violation_fraction)
               << "\ngaps_decreasing: " << (gaps_down ? 1 : 0)
               << "\nconvergence_gap: " << fmt_num(ladder.convergence_gap) << "\n";
            csv << "index,gap\n";
            for (std::size_t k = 1; k < ladder.diagonal_gaps.size(); ++k)
              csv << (1 << k) << "," << fmt_num(ladder.diagonal_gaps[k]) << "\n";
            o.detail = os.str();
            o.csv_name = "ladder.csv";
            o.csv = csv.str();
            doc.checks.push_back(std::move(o));
          } else if (id == "uniqueness") {
            const TerminalData xi = make_terminal(c.problem.terminal);
            const SolutionField reg = solve_bounded(g, xi, bundle, experiment_basis(c));
            const SolutionField pic = picard_solve(g, xi, bundle, experiment_basis(c));
            const double gy = sup_gap(reg, pic, false), gz = sup_gap(reg, pic, true);
            CheckOutcome o;
            o.id = id;
            o.kind = "uniqueness";
            o.verdict = gy <= c.uniqueness_tol ? "satisfied" : "violated";
            o.violated = gy > c.uniqueness_tol;
            o.detail = "sup_gap_y: " + fmt_num(gy) + "\nsup_gap_z: " + fmt_num(gz) +
                       "\ntolerance: " + fmt_num(c.uniqueness_tol) +
                       "\npicard_iterations: " + std::to_string(pic.iterations) + "\n";
            doc.checks.push_back(std::move(o));
          } else {
            doc.checks.push_back(run_bound_check(c, id, g, sol, bundle));
          }
        } catch (const Error& e) {
          doc.errors.push_back(id + ": [" + to_string(e.kind()) + "] " + e.what());
          doc.checks.push_back({id, "bound", "error", false,
                                std::string("message: ") + e.what() + "\n", "", ""});
        }
      }
    } catch (const Error& e) {
      doc.errors.push_back(std::string("solve: [") + to_string(e.kind()) + "] " + e.what());
    }
  }
  doc.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return doc;
}

void write_report(const ReportDocument& doc, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Configuration,
            "cannot write " + (fs::path(dir) / name).string());
    out << body;
  };
  put("report.txt", doc.text());
  if (!doc.summary_csv.empty()) put("summary.csv", doc.summary_csv);
  for (const auto& c : doc.checks)
    if (!c.csv_name.empty()) put(c.csv_name, c.csv);
  put("timing.txt", "wall_seconds: " + fmt_num(doc.wall_seconds) + "\n");
}

}  // namespace bsde
