#include "uniconsist/json_io.hpp"

#include <cmath>

#include "uniconsist/error.hpp"

namespace uniconsist {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// NaN/inf are not representable in JSON.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const SignalSpec& signal) {
  Json j;
  j["basis"] = std::string(to_string(signal.basis()));
  j["coeffs"] = std::vector<double>(signal.coeffs().begin(), signal.coeffs().end());
  return j;
}

SignalSpec signal_from_json(const Json& j) {
  return SignalSpec(basis_from_string(j.at("basis").get<std::string>()), j.at("coeffs").get<std::vector<double>>());
}

Json profile_to_json(const KappaProfile& p) {
  Json j;
  j["r"] = p.r;
  if (p.generator) {
    j["gamma"] = p.generator->gamma;
    j["c"] = p.generator->c;
  }
  if (p.truncation.fixed_J)
    j["J"] = *p.truncation.fixed_J;
  else
    j["J_factor"] = p.truncation.band_factor;
  j["n_list"] = p.n_list();
  j["mode"] = p.mode == KappaMode::Varying ? "varying" : "fixed";
  if (p.band_limited) j["band_limited"] = true;
  j["sigma"] = p.sigma;
  Json levels = Json::array();
  for (const auto& lv : p.levels) {
    Json l;
    l["n"] = lv.n;
    l["J"] = lv.J();
    l["rho"] = lv.rho;
    l["A"] = lv.A;
    l["k_n"] = lv.k_n;
    l["kappa_n_sq"] = lv.kappa_n_sq;
    levels.push_back(l);
  }
  j["levels"] = levels;
  return j;
}

KappaProfile profile_from_json(const Json& j) {
  const double r = j.at("r").get<double>();
  const auto n_list = j.at("n_list").get<std::vector<std::size_t>>();
  const double sigma = j.value("sigma", 1.0);
  const std::string mode = j.value("mode", std::string("varying"));
  if (mode != "varying") throw PreconditionError("profile JSON: only mode 'varying' describes a generated profile");
  if (j.value("band_limited", false)) return build_band_limited_profile(r, j.value("J_factor", 1.0), n_list, sigma);
  TruncationRule rule;
  if (j.contains("J") && j.at("J").is_number()) rule.fixed_J = j.at("J").get<std::size_t>();
  rule.band_factor = j.value("J_factor", 8.0);
  return build_profile(r, j.at("gamma").get<double>(), j.at("c").get<double>(), n_list, rule, sigma);
}

Json to_json(const AssumptionReport& a) {
  Json j;
  j["A1"] = a.a1;
  j["A2"] = {{"lower", number(a.a2_lower)}, {"upper", number(a.a2_upper)}};
  j["A3"] = {{"lower", number(a.a3_lower)}, {"upper", number(a.a3_upper)}};
  auto rows = [](const std::vector<RatioRow>& v, const char* key) {
    Json arr = Json::array();
    for (const auto& r : v) arr.push_back({{key, r.delta}, {"ratio", number(r.ratio)}});
    return arr;
  };
  if (!a.a4.empty())
    j["A4"] = {{"rows", rows(a.a4, "delta")},
               {"lambda", number(a.a4_lambda)},
               {"C", number(a.a4_constant)},
               {"ok", a.a4_ok}};
  j["A5"] = {{"head_ratio_lower", number(a.head_ratio_lower)},
             {"head_ratio_upper", number(a.head_ratio_upper)},
             {"rows", rows(a.a5, "c")}};
  if (!a.a6.empty()) j["A6"] = rows(a.a6, "c");
  j["k_n_slope"] = number(a.k_n_slope);
  return j;
}

Json to_json(const TestReport& r) {
  Json j;
  j["n"] = r.n;
  j["statistic"] = number(r.statistic);
  j["standardized"] = number(r.standardized);
  j["reject"] = r.reject;
  j["predicted_beta"] = optional_number(r.predicted_beta);
  j["noncentrality"] = optional_number(r.noncentrality);
  j["A_n"] = optional_number(r.A_n);
  return j;
}

Json to_json(const MCEstimate& e) {
  Json j;
  j["estimate"] = e.estimate;
  j["std_error"] = e.std_error;
  j["replicates"] = e.replicates;
  j["rejections"] = e.rejections;
  j["ci95"] = {e.ci95.low, e.ci95.high};
  j["seed"] = e.seed;
  j["stream"] = e.stream;
  return j;
}

Json to_json(const CvmNullTable& t) {
  Json j;
  j["alpha"] = t.alphas;
  j["critical"] = t.critical;
  j["J_null"] = t.J_null;
  j["replicates"] = t.replicates;
  j["seed"] = t.seed;
  j["version"] = t.version;
  j["tail_bound"] = cvm_null_tail_bound(t.J_null);
  return j;
}

CvmNullTable null_table_from_json(const Json& j) {
  CvmNullTable t;
  t.alphas = j.at("alpha").get<std::vector<double>>();
  t.critical = j.at("critical").get<std::vector<double>>();
  if (t.alphas.size() != t.critical.size() || t.alphas.empty())
    throw PreconditionError("null table: alpha and critical must be non-empty and of equal length");
  t.J_null = j.at("J_null").get<std::size_t>();
  t.replicates = j.at("replicates").get<std::size_t>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.version = j.value("version", CvmNullTable::kVersion);
  if (t.version != CvmNullTable::kVersion)
    throw PreconditionError("null table version " + std::to_string(t.version) + " is not supported");
  return t;
}

Json to_json(const AlternativeSequence& seq) {
  Json j;
  j["family"] = std::string(to_string(seq.family));
  j["r"] = seq.r;
  j["kind"] = seq.kind;
  j["c_env"] = number(seq.c_env);
  j["C_env"] = number(seq.C_env);
  Json entries = Json::array();
  for (const auto& e : seq.entries) entries.push_back({{"n", e.n}, {"k_n", e.k_n}, {"signal", to_json(e.signal)}});
  j["entries"] = entries;
  return j;
}

AlternativeSequence sequence_from_json(const Json& j) {
  AlternativeSequence seq;
  seq.family = family_from_string(j.at("family").get<std::string>());
  seq.r = j.at("r").get<double>();
  seq.kind = j.value("kind", std::string("custom"));
  for (const auto& e : j.at("entries")) {
    SequenceEntry entry;
    entry.n = e.at("n").get<std::size_t>();
    entry.signal = signal_from_json(e.at("signal"));
    entry.k_n = e.contains("k_n") ? e.at("k_n").get<std::size_t>() : band_index(seq.family, seq.r, entry.n);
    seq.entries.push_back(std::move(entry));
  }
  seq.refresh_envelope();
  return seq;
}

Json to_json(const Classification& c) {
  Json j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["purity"] = std::string(to_string(c.purity));
  j["surrogates"] = {{"con2", c.con2}, {"con3", c.con3}, {"con19", c.con19}};
  j["thresholds"] = {{"c1", c.thresholds.c1}, {"c2", c.thresholds.c2}, {"eps", c.thresholds.eps}, {"C1", c.thresholds.C1}};
  Json rows = Json::array();
  for (const auto& r : c.evidence)
    rows.push_back({{"n", r.n},
                    {"k_n", r.k_n},
                    {"norm_sq_scaled", r.norm_sq_scaled},
                    {"head_scaled", r.head_scaled},
                    {"far_tail_scaled", r.far_tail_scaled}});
  j["evidence"] = rows;
  return j;
}

Json to_json(const SetDescriptor& set) {
  Json j;
  if (const auto* e = std::get_if<EllipsoidSet>(&set)) {
    j["kind"] = "ellipsoid";
    j["axes"] = e->axes;
  } else {
    j["kind"] = "points";
    j["points"] = std::get<PointSet>(set).points;
  }
  return j;
}

SetDescriptor set_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ellipsoid") return EllipsoidSet{j.at("axes").get<std::vector<double>>()};
  if (kind == "points") return PointSet{j.at("points").get<std::vector<std::vector<double>>>()};
  throw PreconditionError("set descriptor kind must be 'ellipsoid' or 'points', got '" + kind + "'");
}

Json to_json(const WidthSequence& w) {
  Json j;
  j["d"] = w.d;
  j["basis_vectors"] = w.basis_vectors;
  return j;
}

Json to_json(const CompactnessVerdict& v) {
  Json j;
  j["epsilon"] = v.epsilon;
  j["i_max"] = v.i_max;
  j["first_index"] = v.first_index ? Json(*v.first_index) : Json(nullptr);
  j["verdict"] = v.describe();
  j["widths"] = to_json(v.widths);
  return j;
}

}  // namespace uniconsist
