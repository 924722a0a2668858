#include "uniconsist/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "uniconsist/error.hpp"
#include "uniconsist/normal.hpp"

namespace uniconsist {

namespace {

const Json& require(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key))
    throw PreconditionError(std::string(where) + ": missing required field '" + key + "'");
  return j.at(key);
}

double number_at(const Json& j, const char* key, const char* where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) throw PreconditionError(std::string(where) + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

MCConfig parse_mc(const Json& config) {
  MCConfig mc;
  mc.replicates = config.value("replicates", std::size_t{10000});
  mc.seed = config.value("seed", std::uint64_t{1});
  mc.threads = config.value("threads", std::size_t{1});
  mc.validate();
  return mc;
}

FamilySetup parse_family(const Json& config, const MCConfig& mc) {
  const Json& fam = require(config, "family", "config");
  FamilySetup s;
  s.family = family_from_string(require(fam, "name", "family").get<std::string>());
  s.alpha = config.value("alpha", 0.05);
  upper_quantile(s.alpha);
  s.r = fam.value("r", s.family == Family::Fixed ? 0.5 : 0.25);
  if (fam.contains("n_list")) s.n_list = fam.at("n_list").get<std::vector<std::size_t>>();
  if (s.family == Family::Fixed && s.n_list.empty()) s.n_list = {1};
  for (std::size_t n : s.n_list)
    if (n == 0) throw PreconditionError("family: n_list entries must be positive");
  s.sigma = fam.value("sigma", 1.0);
  switch (s.family) {
    case Family::Quad: {
      TruncationRule rule;
      if (fam.contains("J")) rule.fixed_J = fam.at("J").get<std::size_t>();
      rule.band_factor = fam.value("J_factor", 8.0);
      const double gamma = fam.value("gamma", 2.0), c = fam.value("c", 1.0);
      if (fam.value("band_limited", false)) {
        if (!s.n_list.empty()) s.profile = build_band_limited_profile(s.r, fam.value("l_factor", 1.0), s.n_list, s.sigma);
      } else if (!s.n_list.empty()) {
        s.profile = build_profile(s.r, gamma, c, s.n_list, rule, s.sigma);
      } else {
        // Profile is built later from derived sample sizes.
        KappaProfile p;
        p.generator = KappaGenerator{s.r, gamma, c};
        p.truncation = rule;
        p.r = s.r;
        p.sigma = s.sigma;
        s.profile = p;
      }
      break;
    }
    case Family::Kernel: {
      if (fam.contains("kernel") && fam.at("kernel").is_array())
        s.kernel = Kernel::from_table(fam.at("kernel").get<std::vector<double>>());
      else
        s.kernel = Kernel::by_name(fam.value("kernel", std::string("epanechnikov")));
      s.h_rule = fam.value("h_rule", std::string("n^{4r-2}"));
      if (s.h_rule == "explicit")
        s.h_const = number_at(fam, "h", "family");
      else if (s.h_rule == "n^{4r-2}")
        s.h_const = fam.value("h_const", 1.0);
      else
        throw PreconditionError("family: h_rule must be \"n^{4r-2}\" or \"explicit\"");
      s.kernel_J_factor = fam.value("J_factor", 8.0);
      break;
    }
    case Family::Chi2:
      if (fam.contains("m"))
        s.chi2 = Chi2Config::with_cells(fam.at("m").get<std::size_t>(), s.alpha);
      else
        s.chi2 = Chi2Config::with_rule(fam.value("c3", 1.0), s.r, s.alpha);
      break;
    case Family::Cvm:
      if (fam.contains("null_table")) {
        s.cvm_table = null_table_from_json(fam.at("null_table"));
      } else {
        const auto J_null = fam.value("J_null", std::size_t{1024});
        const auto reps = fam.value("null_replicates", std::size_t{100000});
        const auto seed = fam.value("null_seed", mix64(mc.seed ^ 0xC7A1ULL));
        s.cvm_table = generate_cvm_null_table({s.alpha}, J_null, reps, seed, mc.threads);
      }
      s.cvm_table->critical_value(s.alpha);
      break;
    case Family::Fixed: {
      const auto J = fam.value("J", std::size_t{64});
      std::vector<double> scales = fam.value("scales", std::vector<double>{});
      if (fam.contains("kappa") && fam.at("kappa").is_array())
        s.fixed = FixedKappa(fam.at("kappa").get<std::vector<double>>(), scales);
      else {
        const std::string kind = fam.value("kappa", std::string("inverse-square"));
        if (kind != "inverse-square") throw PreconditionError("family: kappa must be \"inverse-square\" or an array");
        std::vector<double> k(J);
        for (std::size_t j = 1; j <= J; ++j) k[j - 1] = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
        s.fixed = FixedKappa(std::move(k), scales);
      }
      const auto reps = fam.value("null_replicates", std::size_t{100000});
      const auto seed = fam.value("null_seed", mix64(mc.seed ^ 0xF1C5ULL));
      s.fixed_critical = fixed_kappa_critical(*s.fixed, s.alpha, reps, seed, mc.threads);
      break;
    }
  }
  return s;
}

double FamilySetup::bandwidth(std::size_t n) const {
  if (h_rule == "explicit") return h_const;
  return h_const * std::pow(static_cast<double>(n), 4.0 * r - 2.0);
}

std::size_t FamilySetup::k_n(std::size_t n) const { return band_index(family, r, n, profile_ptr()); }

std::unique_ptr<FamilyTest> FamilySetup::make_test(std::size_t n) const {
  switch (family) {
    case Family::Quad: return std::make_unique<QuadFamilyTest>(QuadTestConfig::make(*profile, n, alpha));
    case Family::Kernel:
      return std::make_unique<KernelFamilyTest>(
          KernelTestConfig::make(kernel, bandwidth(n), NoiseModel::make(sigma, n), alpha, 0, kernel_J_factor));
    case Family::Chi2: return std::make_unique<Chi2FamilyTest>(n, chi2->cells(n), alpha);
    case Family::Cvm: return std::make_unique<CvmFamilyTest>(n, cvm_table->critical_value(alpha), alpha);
    case Family::Fixed: return std::make_unique<FixedKappaFamilyTest>(*fixed, n, fixed_critical, alpha);
  }
  throw PreconditionError("unsupported family");
}

std::string suite_csv_header() {
  return "suite,family,scenario,n,replicates,rejections,rate,rate_se,empirical_alpha,empirical_beta,"
         "predicted_beta,abs_gap,within_band,index,paired_diff,paired_se";
}

std::string SuiteResult::csv() const {
  std::ostringstream os;
  os << suite_csv_header() << '\n';
  for (const auto& r : rows) {
    os << csv_escape(suite) << ',' << r.family << ',' << csv_escape(r.scenario) << ',' << r.n << ',' << r.replicates
       << ',' << r.rejections << ',' << format_number(r.rate) << ',' << format_number(r.rate_se) << ','
       << format_number(r.empirical_alpha) << ',' << format_optional(r.empirical_beta) << ','
       << format_optional(r.predicted_beta) << ',' << format_optional(r.abs_gap) << ','
       << (r.within_band ? (*r.within_band ? "1" : "0") : "") << ',' << format_optional(r.index) << ','
       << format_optional(r.paired_diff) << ',' << format_optional(r.paired_se) << '\n';
  }
  return os.str();
}

Json SuiteResult::summary(const Json& config) const {
  Json j;
  j["suite"] = suite;
  j["passed"] = passed;
  Json checks_json = Json::array();
  for (const auto& c : checks)
    checks_json.push_back({{"name", c.name},
                           {"value", std::isfinite(c.value) ? Json(c.value) : Json(nullptr)},
                           {"relation", c.relation},
                           {"threshold", c.threshold},
                           {"passed", c.passed}});
  j["checks"] = checks_json;
  j["details"] = details;
  j["config"] = config;
  return j;
}

namespace {

struct Context {
  std::string suite;
  Json config;
  MCConfig mc;
  FamilySetup setup;
  Json thresholds;
  Json alternative;
  SuiteResult result;

  double threshold(const char* key) const { return number_at(thresholds, key, "thresholds"); }
  double threshold_or(const char* key, double fallback) const {
    return thresholds.contains(key) ? threshold(key) : fallback;
  }

  void check(std::string name, double value, const std::string& relation, double threshold) {
    bool ok = false;
    if (relation == "<=") ok = value <= threshold;
    else if (relation == ">=") ok = value >= threshold;
    else if (relation == "<") ok = value < threshold;
    else if (relation == ">") ok = value > threshold;
    else if (relation == "==") ok = value == threshold;
    result.checks.push_back({std::move(name), value, threshold, relation, ok});
    result.passed = result.passed && ok;
  }

  PairedCounts run(const FamilyTest& test, const std::vector<Scenario>& scenarios) const {
    const std::string key = suite + ":" + std::string(to_string(setup.family));
    return run_paired(test, scenarios, mc, stream_key(key.c_str(), test.n()));
  }

  // Appends a row for scenario s; the null scenario must sit at index 0.
  SuiteRow& add_row(const FamilyTest& test, const PairedCounts& pc, const std::vector<Scenario>& sc, std::size_t s,
                    std::optional<std::size_t> reference = std::nullopt, std::optional<double> band = std::nullopt) {
    SuiteRow row;
    row.family = std::string(to_string(setup.family));
    row.scenario = sc[s].label;
    row.n = test.n();
    const MCEstimate e = pc.estimate(s);
    row.replicates = e.replicates;
    row.rejections = e.rejections;
    row.rate = e.estimate;
    row.rate_se = e.std_error;
    row.empirical_alpha = pc.estimate(0).estimate;
    if (s != 0 && sc[s].signal) {
      row.empirical_beta = 1.0 - e.estimate;
      row.predicted_beta = test.predicted_beta(*sc[s].signal);
      row.index = test.index(*sc[s].signal);
      if (row.predicted_beta) {
        row.abs_gap = std::abs(*row.empirical_beta - *row.predicted_beta);
        if (band) row.within_band = *row.abs_gap <= *band;
      }
    }
    if (reference) {
      row.paired_diff = e.estimate - pc.estimate(*reference).estimate;
      row.paired_se = pc.joint_se(s, *reference);
    }
    result.rows.push_back(row);
    return result.rows.back();
  }
};

ConsistentRecipe parse_consistent(const Json& j) {
  ConsistentRecipe r;
  r.amplitude = j.value("amplitude", 1.0);
  r.c1 = j.value("c1", 0.0);
  r.c2 = j.value("c2", 1.0);
  r.profile = mass_profile_from_string(j.value("profile", std::string("lowest")));
  r.seed = j.value("seed", std::uint64_t{1});
  r.max_terms = j.value("max_terms", std::size_t{0});
  return r;
}

InconsistentRecipe parse_inconsistent(const Json& j) {
  InconsistentRecipe r;
  r.amplitude = j.value("amplitude", 1.0);
  r.separation = require(j, "separation", "alternative").get<std::vector<double>>();
  r.width = j.value("width", std::size_t{1});
  return r;
}

ClassifyThresholds parse_classify(const Json& j) {
  ClassifyThresholds t;
  t.c1 = j.value("c1", t.c1);
  t.c2 = j.value("c2", t.c2);
  t.eps = j.value("eps", t.eps);
  t.C1 = j.value("C1", t.C1);
  return t;
}

void require_n_list(const Context& ctx) {
  if (ctx.setup.n_list.empty()) throw PreconditionError(ctx.suite + ": family.n_list is required");
}

// Trend rule for noisy sequences: every step may rise by at most k joint
// standard errors and the last value must sit below the first.
void trend_check(Context& ctx, const std::string& name, const std::vector<double>& v, const std::vector<double>& se,
                 double k) {
  double worst = -1e300;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    worst = std::max(worst, v[i + 1] - v[i] - k * std::hypot(se[i], se[i + 1]));
  if (v.size() >= 2) {
    ctx.check(name + ": largest step excess", worst, "<=", 0.0);
    ctx.check(name + ": last minus first", v.back() - v.front(), "<", 0.0);
  }
}

void strict_decrease_check(Context& ctx, const std::string& name, const std::vector<double>& v) {
  double worst = -1e300;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) worst = std::max(worst, v[i + 1] - v[i]);
  if (v.size() >= 2) ctx.check(name + ": largest step", worst, "<", 0.0);
}

void suite_size(Context& ctx) {
  require_n_list(ctx);
  const bool wilson = ctx.thresholds.value("band", std::string()) == "wilson";
  for (std::size_t n : ctx.setup.n_list) {
    const auto test = ctx.setup.make_test(n);
    const std::vector<Scenario> sc{test->prepare(nullptr, "null")};
    const auto pc = ctx.run(*test, sc);
    const auto& row = ctx.add_row(*test, pc, sc, 0);
    const std::string tag = "size n=" + std::to_string(n);
    if (wilson) {
      const auto band = wilson_interval(ctx.setup.alpha * static_cast<double>(pc.replicates),
                                        static_cast<double>(pc.replicates));
      ctx.check(tag + " >= wilson low", row.rate, ">=", band.low);
      ctx.check(tag + " <= wilson high", row.rate, "<=", band.high);
    } else {
      ctx.check(tag + " >= size_low", row.rate, ">=", ctx.threshold("size_low"));
      ctx.check(tag + " <= size_high", row.rate, "<=", ctx.threshold("size_high"));
    }
  }
  if (ctx.setup.cvm_table) ctx.result.details["null_table"] = to_json(*ctx.setup.cvm_table);
  if (ctx.setup.profile && !ctx.setup.profile->levels.empty())
    ctx.result.details["assumptions"] = to_json(validate_assumptions(*ctx.setup.profile));
}

void suite_power_formula(Context& ctx) {
  require_n_list(ctx);
  const auto targets = require(ctx.alternative, "targets", "alternative").get<std::vector<double>>();
  ConsistentRecipe recipe = parse_consistent(ctx.alternative);
  recipe.amplitude = 1.0;
  recipe.c1 = 0.0;
  const double tol = ctx.threshold("beta_tol");
  const double x_alpha = upper_quantile(ctx.setup.alpha);
  for (std::size_t n : ctx.setup.n_list) {
    const auto test = ctx.setup.make_test(n);
    const std::size_t one[] = {n};
    const SignalSpec base =
        make_consistent(ctx.setup.family, ctx.setup.r, recipe, one, ctx.setup.profile_ptr()).entries[0].signal;
    const auto d0 = test->drift(base);
    if (!d0 || !(*d0 > 0.0)) throw PreconditionError("power-formula: the family has no power formula");
    std::vector<Scenario> sc{test->prepare(nullptr, "null")};
    for (double beta : targets) {
      const double want = x_alpha - normal_quantile(beta);
      if (!(want > 0.0)) throw PreconditionError("power-formula: target beta must be below 1 - alpha");
      std::ostringstream label;
      label << "beta=" << beta;
      sc.push_back(test->prepare(std::make_unique<SignalSpec>(base.scaled(std::sqrt(want / *d0))).get(), label.str()));
    }
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    for (std::size_t s = 1; s < sc.size(); ++s) {
      const auto& row = ctx.add_row(*test, pc, sc, s, std::nullopt, tol);
      ctx.check("n=" + std::to_string(n) + " " + sc[s].label + " |emp - pred|", *row.abs_gap, "<=", tol);
    }
  }
}

void classification_details(Context& ctx, const char* key, const AlternativeSequence& seq) {
  if (!ctx.alternative.contains("classify")) return;
  const auto cl = classify(seq, parse_classify(ctx.alternative.at("classify")));
  ctx.result.details[key] = to_json(cl);
}

void suite_consistency(Context& ctx) {
  require_n_list(ctx);
  const auto seq = make_consistent(ctx.setup.family, ctx.setup.r, parse_consistent(ctx.alternative),
                                   ctx.setup.n_list, ctx.setup.profile_ptr());
  std::vector<double> index;
  double last_beta = 0.0;
  for (const auto& e : seq.entries) {
    const auto test = ctx.setup.make_test(e.n);
    const std::vector<Scenario> sc{test->prepare(nullptr, "null"), test->prepare(&e.signal, "consistent")};
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    const auto& row = ctx.add_row(*test, pc, sc, 1);
    last_beta = *row.empirical_beta;
    index.push_back(*row.index);
  }
  ctx.check("beta at largest n", last_beta, "<=", 1.0 - ctx.setup.alpha - ctx.threshold("beta_margin"));
  ctx.result.details["sequence"] = to_json(seq);
  ctx.result.details["index"] = index;
  if (ctx.alternative.contains("classify")) {
    const auto cl = classify(seq, parse_classify(ctx.alternative.at("classify")));
    ctx.check("classified consistent-witness", cl.verdict == Verdict::ConsistentWitness ? 1.0 : 0.0, "==", 1.0);
    ctx.result.details["classification"] = to_json(cl);
  }
}

void suite_inconsistency(Context& ctx) {
  require_n_list(ctx);
  const auto seq = make_inconsistent(ctx.setup.family, ctx.setup.r, parse_inconsistent(ctx.alternative),
                                     ctx.setup.n_list, ctx.setup.profile_ptr());
  std::vector<double> index;
  double last_power = 0.0;
  for (const auto& e : seq.entries) {
    const auto test = ctx.setup.make_test(e.n);
    const std::vector<Scenario> sc{test->prepare(nullptr, "null"), test->prepare(&e.signal, "inconsistent")};
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    const auto& row = ctx.add_row(*test, pc, sc, 1);
    last_power = row.rate;
    index.push_back(*row.index);
  }
  ctx.check("power - alpha at largest n", last_power - ctx.setup.alpha, "<=", ctx.threshold("power_excess"));
  strict_decrease_check(ctx, "index decreasing", index);
  ctx.result.details["sequence"] = to_json(seq);
  ctx.result.details["index"] = index;
  if (ctx.alternative.contains("classify")) {
    const auto cl = classify(seq, parse_classify(ctx.alternative.at("classify")));
    ctx.check("classified inconsistent-witness", cl.verdict == Verdict::InconsistentWitness ? 1.0 : 0.0, "==", 1.0);
    ctx.result.details["classification"] = to_json(cl);
  }
}

void suite_interaction(Context& ctx) {
  require_n_list(ctx);
  const auto cons = make_consistent(ctx.setup.family, ctx.setup.r,
                                    parse_consistent(require(ctx.alternative, "consistent", "alternative")),
                                    ctx.setup.n_list, ctx.setup.profile_ptr());
  const auto inc = make_inconsistent(ctx.setup.family, ctx.setup.r,
                                     parse_inconsistent(require(ctx.alternative, "inconsistent", "alternative")),
                                     ctx.setup.n_list, ctx.setup.profile_ptr());
  const auto sum = add_sequences(cons, inc);
  std::vector<double> gaps, ses;
  for (std::size_t i = 0; i < cons.entries.size(); ++i) {
    const auto test = ctx.setup.make_test(cons.entries[i].n);
    const std::vector<Scenario> sc{test->prepare(nullptr, "null"), test->prepare(&cons.entries[i].signal, "f"),
                                   test->prepare(&sum.entries[i].signal, "f+f1")};
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    ctx.add_row(*test, pc, sc, 1);
    const auto& row = ctx.add_row(*test, pc, sc, 2, std::size_t{1});
    gaps.push_back(std::abs(*row.paired_diff));
    ses.push_back(*row.paired_se);
  }
  ctx.check("|beta(f) - beta(f+f1)| at largest n", gaps.back(), "<=", ctx.threshold("beta_gap"));
  trend_check(ctx, "gap trend", gaps, ses, ctx.threshold_or("trend_se", 2.0));
  ctx.result.details["gaps"] = gaps;
  classification_details(ctx, "classification_sum", sum);
}

SignalSpec tail_spike(const FamilySetup& setup, std::size_t n, const Json& tail) {
  const double amp = tail.value("amplitude", 0.5);
  const double position = number_at(tail, "position", "tail");
  const auto j = static_cast<std::size_t>(std::ceil(position * static_cast<double>(setup.k_n(n))));
  const BasisKind basis = family_basis(setup.family);
  const double value = amp * std::pow(static_cast<double>(n), -setup.r);
  return SignalSpec::spike(basis, (j - 1) * coords_per_frequency(basis), value);
}

void suite_head_information(Context& ctx) {
  require_n_list(ctx);
  if (ctx.setup.family != Family::Quad) throw PreconditionError("head-information: requires the quad family");
  const auto cons = make_consistent(ctx.setup.family, ctx.setup.r,
                                    parse_consistent(require(ctx.alternative, "consistent", "alternative")),
                                    ctx.setup.n_list, ctx.setup.profile_ptr());
  const Json& tail_cfg = require(ctx.alternative, "tail", "alternative");
  const double cutoff_factor = number_at(ctx.alternative, "cutoff", "alternative");
  double last_delta = 0.0, last_gap = 0.0, worst_bound = -1e300;
  Json deltas = Json::array();
  for (const auto& e : cons.entries) {
    const auto test = ctx.setup.make_test(e.n);
    const auto& quad = dynamic_cast<const QuadFamilyTest&>(*test);
    const SignalSpec f = e.signal + tail_spike(ctx.setup, e.n, tail_cfg);
    const auto cutoff = static_cast<std::size_t>(std::ceil(cutoff_factor * static_cast<double>(e.k_n)));
    const auto [head, tail] = decompose(f, cutoff);
    const double delta = quad.index(tail);
    const std::vector<Scenario> sc{test->prepare(nullptr, "null"), test->prepare(&f, "f"), test->prepare(&head, "head")};
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    ctx.add_row(*test, pc, sc, 1);
    const auto& row = ctx.add_row(*test, pc, sc, 2, std::size_t{1});
    last_delta = delta;
    last_gap = std::abs(*row.paired_diff);
    // |Phi(x - a) - Phi(x - b)| <= phi_max |a - b| with a - b = delta / sqrt(2 A_n).
    const double pred_gap = std::abs(*quad.predicted_beta(f) - *quad.predicted_beta(head));
    const double bound = kInvSqrt2Pi * delta / std::sqrt(2.0 * quad.config().level.A);
    worst_bound = std::max(worst_bound, pred_gap - bound);
    deltas.push_back({{"n", e.n}, {"cutoff", cutoff}, {"delta", delta}, {"predicted_gap", pred_gap}, {"bound", bound}});
  }
  ctx.check("tail noncentrality delta at largest n", last_delta, "<=", ctx.threshold("delta_max"));
  ctx.check("|beta(f) - beta(head)| at largest n", last_gap, "<=", ctx.threshold("beta_gap"));
  ctx.check("predicted gap minus Lipschitz bound", worst_bound, "<=", 1e-12);
  ctx.result.details["delta"] = deltas;
}

void suite_purity(Context& ctx) {
  require_n_list(ctx);
  const auto cons = make_consistent(ctx.setup.family, ctx.setup.r,
                                    parse_consistent(require(ctx.alternative, "consistent", "alternative")),
                                    ctx.setup.n_list, ctx.setup.profile_ptr());
  const auto inc = make_inconsistent(ctx.setup.family, ctx.setup.r,
                                     parse_inconsistent(require(ctx.alternative, "inconsistent", "alternative")),
                                     ctx.setup.n_list, ctx.setup.profile_ptr());
  const auto sum = add_sequences(cons, inc);
  const ClassifyThresholds th = parse_classify(require(ctx.alternative, "classify", "alternative"));
  const auto cl_cons = classify(cons, th);
  const auto cl_sum = classify(sum, th);
  ctx.check("f_n purely-consistent-witness", cl_cons.purity == Verdict::PurelyConsistentWitness ? 1.0 : 0.0, "==", 1.0);
  ctx.check("f_n + f_1n consistent-witness", cl_sum.verdict == Verdict::ConsistentWitness ? 1.0 : 0.0, "==", 1.0);
  ctx.check("f_n + f_1n purity surrogate fails", cl_sum.purity == Verdict::Indeterminate ? 1.0 : 0.0, "==", 1.0);
  double worst_tail = -1e300;
  double last_gap = 0.0;
  for (const auto& e : cons.entries) {
    const auto cutoff = static_cast<std::size_t>(std::floor(th.C1 * static_cast<double>(e.k_n))) + 1;
    const auto [head, tail] = decompose(e.signal, cutoff);
    const double scaled = std::sqrt(tail.norm_sq()) * std::pow(static_cast<double>(e.n), ctx.setup.r);
    worst_tail = std::max(worst_tail, scaled - std::sqrt(th.eps));
    const auto test = ctx.setup.make_test(e.n);
    const std::vector<Scenario> sc{test->prepare(nullptr, "null"), test->prepare(&e.signal, "f"),
                                   test->prepare(&head, "head")};
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    ctx.add_row(*test, pc, sc, 1);
    last_gap = std::abs(*ctx.add_row(*test, pc, sc, 2, std::size_t{1}).paired_diff);
  }
  ctx.check("||f - head|| n^r minus sqrt(eps)", worst_tail, "<=", 0.0);
  ctx.check("|beta(f) - beta(head)| at largest n", last_gap, "<=", ctx.threshold("beta_gap"));
  ctx.result.details["classification_f"] = to_json(cl_cons);
  ctx.result.details["classification_sum"] = to_json(cl_sum);
}

void suite_compactness(Context& ctx) {
  if (ctx.setup.family != Family::Fixed) throw PreconditionError("compactness: requires the fixed family");
  const auto spikes = require(ctx.alternative, "spikes", "alternative").get<std::vector<std::size_t>>();
  const double norm = ctx.alternative.value("norm", 1.0);
  for (std::size_t n : ctx.setup.n_list) {
    const auto test = ctx.setup.make_test(n);
    std::vector<Scenario> sc{test->prepare(nullptr, "null")};
    for (std::size_t i : spikes) {
      if (i == 0 || i > test->coords()) throw PreconditionError("compactness: spike index outside 1..J");
      const SignalSpec e = SignalSpec::spike(BasisKind::CosinePi, i - 1, norm / std::sqrt(static_cast<double>(n)));
      sc.push_back(test->prepare(&e, "e_" + std::to_string(i)));
    }
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    std::vector<double> power, se;
    for (std::size_t s = 1; s < sc.size(); ++s) {
      const auto& row = ctx.add_row(*test, pc, sc, s);
      power.push_back(row.rate);
      se.push_back(row.rate_se);
    }
    ctx.check("power(last spike) - alpha, n=" + std::to_string(n), power.back() - ctx.setup.alpha, "<=",
              ctx.threshold("power_excess"));
    trend_check(ctx, "power trend, n=" + std::to_string(n), power, se, ctx.threshold_or("trend_se", 2.0));
  }
  if (ctx.alternative.contains("ellipsoids")) {
    const Json& el = ctx.alternative.at("ellipsoids");
    const auto count = el.value("count", std::size_t{20});
    const auto max_dim = el.value("max_dim", std::size_t{8});
    RngStream rng(el.value("seed", std::uint64_t{1}), stream_key("ellipsoids"), 0);
    double worst = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_dim));
      EllipsoidSet e;
      for (std::size_t i = 0; i < dim; ++i) e.axes.push_back(0.1 + 9.9 * rng.uniform());
      const auto w = greedy_widths(e, dim);
      auto sorted = e.axes;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      for (std::size_t i = 0; i < dim; ++i) worst = std::max(worst, std::abs(w.d[i] - sorted[i]));
    }
    ctx.check("ellipsoid widths vs sorted axes", worst, "<=", ctx.threshold("width_tol"));
  }
}

void suite_unbiasedness(Context& ctx) {
  if (ctx.setup.family != Family::Fixed && ctx.setup.family != Family::Cvm)
    throw PreconditionError("unbiasedness: requires the fixed or cvm family");
  require_n_list(ctx);
  const auto count = ctx.alternative.value("count", std::size_t{20});
  const auto dim = ctx.alternative.value("dimension", std::size_t{8});
  const double lo = ctx.alternative.value("norm_min", 0.5), hi = ctx.alternative.value("norm_max", 3.0);
  const auto seed = ctx.alternative.value("seed", std::uint64_t{1});
  const double k = ctx.threshold_or("se_multiplier", 2.0);
  double worst = 1e300;
  for (std::size_t n : ctx.setup.n_list) {
    const auto test = ctx.setup.make_test(n);
    std::vector<Scenario> sc{test->prepare(nullptr, "null")};
    for (std::size_t i = 0; i < count; ++i) {
      RngStream rng(seed, stream_key("shift", n), i);
      std::vector<double> dir(dim);
      double nrm = 0.0;
      for (auto& v : dir) {
        v = rng.normal();
        nrm += v * v;
      }
      const double target = lo + (hi - lo) * rng.uniform();
      for (auto& v : dir) v *= target / std::sqrt(nrm) / std::sqrt(static_cast<double>(n));
      const SignalSpec shift(BasisKind::CosinePi, dir);
      sc.push_back(test->prepare(&shift, "shift_" + std::to_string(i + 1)));
    }
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    for (std::size_t s = 1; s < sc.size(); ++s) {
      const auto& row = ctx.add_row(*test, pc, sc, s, std::size_t{0});
      worst = std::min(worst, *row.paired_diff + k * *row.paired_se);
    }
  }
  ctx.check("min over shifts of (power - size + k joint SE)", worst, ">", 0.0);
}

void suite_maxiset(Context& ctx) {
  if (ctx.setup.family != Family::Quad) throw PreconditionError("maxiset-counterexample: requires the quad family");
  const double r = ctx.setup.r;
  const double s = r / (2.0 - 4.0 * r);
  const double p = number_at(ctx.alternative, "tau_exponent", "alternative");
  if (!(p > 1.0 && p < 1.0 + 2.0 * s))
    throw PreconditionError("maxiset-counterexample: tau_exponent must lie in (1, 1 + 2s) so tau is outside the body");
  const double A = number_at(ctx.alternative, "tau_scale", "alternative");
  const auto cutoffs = require(ctx.alternative, "cutoffs", "alternative").get<std::vector<std::size_t>>();
  const auto J_tau = ctx.alternative.value("J_tau", std::size_t{1} << 20);
  std::vector<std::size_t> n_list;
  std::vector<double> C, norms, tails;
  for (std::size_t m : cutoffs) {
    if (m == 0 || m >= J_tau) throw PreconditionError("maxiset-counterexample: cutoffs must lie in 1..J_tau-1");
    double sum = 0.0;
    for (std::size_t j = J_tau; j >= m; --j) sum += A * std::pow(static_cast<double>(j), -p);
    // Remainder beyond J_tau, bounded by the integral.
    const double tail = A * std::pow(static_cast<double>(J_tau), 1.0 - p) / (p - 1.0);
    C.push_back(std::pow(static_cast<double>(m), 2.0 * s) * sum);
    norms.push_back(std::sqrt(sum));
    tails.push_back(tail);
    n_list.push_back(static_cast<std::size_t>(std::llround(std::pow(sum, -1.0 / (2.0 * r)))));
  }
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
    if (!(n_list[i + 1] > n_list[i])) throw PreconditionError("maxiset-counterexample: derived n_l must increase");
  KappaProfile& prof = *ctx.setup.profile;
  prof = build_profile(r, prof.generator->gamma, prof.generator->c, n_list, prof.truncation, prof.sigma);
  std::vector<double> R;
  Json rows = Json::array();
  double last_power = 0.0;
  for (std::size_t l = 0; l < cutoffs.size(); ++l) {
    std::vector<double> coeffs(J_tau, 0.0);
    for (std::size_t j = cutoffs[l]; j <= J_tau; ++j) coeffs[j - 1] = std::sqrt(A * std::pow(static_cast<double>(j), -p));
    const SignalSpec eta(BasisKind::CosinePi, std::move(coeffs));
    const auto test = ctx.setup.make_test(n_list[l]);
    const std::vector<Scenario> sc{test->prepare(nullptr, "null"),
                                   test->prepare(&eta, "eta_m=" + std::to_string(cutoffs[l]))};
    const auto pc = ctx.run(*test, sc);
    ctx.add_row(*test, pc, sc, 0);
    const auto& row = ctx.add_row(*test, pc, sc, 1);
    R.push_back(*row.index);
    last_power = row.rate;
    const std::size_t k = prof.level(n_list[l]).k_n;
    rows.push_back({{"m", cutoffs[l]},
                    {"n", n_list[l]},
                    {"k_n", k},
                    {"m_over_k", static_cast<double>(cutoffs[l]) / static_cast<double>(k)},
                    {"C_l", C[l]},
                    {"norm", norms[l]},
                    {"tau_tail_bound", tails[l]},
                    {"unobserved_mass", sc[1].unobserved_mass},
                    {"R_n", R.back()}});
  }
  strict_decrease_check(ctx, "R_n decreasing", R);
  std::vector<double> negC(C.size());
  std::transform(C.begin(), C.end(), negC.begin(), [](double v) { return -v; });
  strict_decrease_check(ctx, "C_l increasing", negC);
  ctx.check("power - alpha at largest n", last_power - ctx.setup.alpha, "<=", ctx.threshold("power_excess"));
  ctx.result.details["schedule"] = rows;
}

using SuiteFn = std::function<void(Context&)>;

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r{
      {"compactness", suite_compactness},
      {"consistency", suite_consistency},
      {"head-information", suite_head_information},
      {"inconsistency", suite_inconsistency},
      {"interaction", suite_interaction},
      {"maxiset-counterexample", suite_maxiset},
      {"power-formula", suite_power_formula},
      {"purity", suite_purity},
      {"size", suite_size},
      {"unbiasedness", suite_unbiasedness},
  };
  return r;
}

}  // namespace

std::vector<std::string> available_suites() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

SuiteResult run_suite(const std::string& name, const Json& config, std::optional<std::size_t> threads) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    std::string list;
    for (const auto& s : available_suites()) list += (list.empty() ? "" : ", ") + s;
    throw PreconditionError("unknown suite '" + name + "'; available suites: " + list);
  }
  if (!config.is_object()) throw PreconditionError("suite config must be a JSON object");
  Context ctx;
  ctx.suite = name;
  ctx.config = config;
  ctx.mc = parse_mc(config);
  if (threads) ctx.mc.threads = *threads;
  ctx.mc.validate();
  ctx.setup = parse_family(config, ctx.mc);
  ctx.thresholds = config.value("thresholds", Json::object());
  ctx.alternative = config.value("alternative", Json::object());
  ctx.result.suite = name;
  it->second(ctx);
  return ctx.result;
}

void write_suite_outputs(const SuiteResult& result, const Json& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (result.suite + ".csv"), std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / (result.suite + ".csv")).string());
    csv << result.csv();
  }
  std::ofstream js(dir / (result.suite + "_summary.json"), std::ios::binary);
  if (!js) throw std::runtime_error("cannot write summary JSON in " + dir.string());
  js << result.summary(config).dump(2) << '\n';
}

}  // namespace uniconsist
