#include "uniconsist_cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "uniconsist/error.hpp"
#include "uniconsist/suites.hpp"

namespace uniconsist::cli {

namespace {

// Raised for unreadable or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is one past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw InputError(path + ":" + line_col(text, at) + ": " + msg);
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError(path + ": cannot write file");
  f << text;
}

std::vector<double> numbers(const Json& data, const char* key) {
  if (!data.contains(key) || !data.at(key).is_array())
    throw PreconditionError(std::string("data: field '") + key + "' must be an array of numbers");
  return data.at(key).get<std::vector<double>>();
}

int cmd_suite(const std::string& name, const std::string& config_path, const std::string& out_dir,
              std::optional<std::size_t> threads, std::ostream& out) {
  Json config = read_json(config_path);
  if (const char* env = std::getenv("UNICONSIST_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(env, &end, 10);
    if (*end != '\0') throw PreconditionError("UNICONSIST_SEED must be an unsigned integer");
    config["seed"] = seed;
  }
  const SuiteResult result = run_suite(name, config, threads);
  write_suite_outputs(result, config, out_dir);
  for (const auto& c : result.checks)
    out << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << format_number(c.value) << ' ' << c.relation << ' '
        << format_number(c.threshold) << '\n';
  out << name << ": " << (result.passed ? "passed" : "thresholds violated") << '\n';
  return result.passed ? kOk : kThresholds;
}

// The data file carries the same "family" block as a suite config plus the
// observations and the sample size.
int cmd_statistic(const std::string& family, const std::string& data_path, std::optional<std::size_t> threads,
                  std::ostream& out) {
  Json data = read_json(data_path);
  if (!data.contains("family")) data["family"] = Json::object();
  if (!data["family"].is_object()) throw PreconditionError("data: 'family' must be an object");
  if (data["family"].contains("name") && data["family"]["name"] != family)
    throw PreconditionError("data: family block names '" + data["family"]["name"].get<std::string>() +
                            "' but the command asked for '" + family + "'");
  data["family"]["name"] = family;
  if (!data.contains("n") || !data.at("n").is_number_unsigned())
    throw PreconditionError("data: field 'n' (sample size) is required");
  const auto n = data.at("n").get<std::size_t>();
  data["family"]["n_list"] = std::vector<std::size_t>{n};
  MCConfig mc = parse_mc(data);
  if (threads) mc.threads = *threads;
  const FamilySetup setup = parse_family(data, mc);
  std::optional<SignalSpec> alt;
  if (data.contains("alternative")) alt = signal_from_json(data.at("alternative"));
  const SignalSpec* alt_ptr = alt ? &*alt : nullptr;

  TestReport report;
  Json extra = Json::object();
  switch (setup.family) {
    case Family::Quad: {
      const auto cfg = QuadTestConfig::make(*setup.profile, n, setup.alpha);
      report = decide_and_predict(numbers(data, "y"), alt_ptr, cfg);
      extra["k_n"] = cfg.level.k_n;
      extra["J"] = cfg.level.J();
      break;
    }
    case Family::Kernel: {
      const auto cfg = KernelTestConfig::make(setup.kernel, setup.bandwidth(n), NoiseModel::make(setup.sigma, n),
                                              setup.alpha, 0, setup.kernel_J_factor);
      report = kernel_decide(numbers(data, "y"), alt_ptr, cfg);
      extra["h"] = cfg.h;
      extra["J"] = cfg.J;
      extra["gamma_sq"] = cfg.gamma_sq;
      break;
    }
    case Family::Chi2: {
      const auto points = numbers(data, "points");
      if (points.size() != n) throw PreconditionError("data: 'points' must hold n values");
      report = chi2_decide_predict(points, alt_ptr, *setup.chi2, n);
      extra["m"] = setup.chi2->cells(n);
      break;
    }
    case Family::Cvm: {
      const auto points = numbers(data, "points");
      if (points.size() != n) throw PreconditionError("data: 'points' must hold n values");
      const double critical = setup.cvm_table->critical_value(setup.alpha);
      report.n = n;
      report.statistic = cvm_statistic(points);
      report.standardized = report.statistic;
      report.reject = report.statistic > critical;
      if (alt) report.noncentrality = static_cast<double>(n) * cvm_population(*alt);
      extra["critical"] = critical;
      break;
    }
    case Family::Fixed: {
      const auto z = numbers(data, "z");
      report.n = n;
      report.statistic = fixed_kappa_statistic(z, *setup.fixed);
      report.standardized = report.statistic;
      report.reject = report.statistic > setup.fixed_critical;
      if (alt) report.noncentrality = setup.fixed->functional(alt->scaled(std::sqrt(static_cast<double>(n))));
      extra["critical"] = setup.fixed_critical;
      break;
    }
  }
  Json j = to_json(report);
  j["family"] = family;
  j["alpha"] = setup.alpha;
  for (auto& [k, v] : extra.items()) j[k] = v;
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_classify(const std::string& path, const ClassifyThresholds& th, std::ostream& out) {
  const auto seq = sequence_from_json(read_json(path));
  out << to_json(classify(seq, th)).dump(2) << '\n';
  return kOk;
}

int cmd_nulltable(const std::vector<double>& alphas, std::size_t replicates, std::size_t J_null, std::uint64_t seed,
                  std::size_t threads, const std::string& out_path, std::ostream& out) {
  const auto table = generate_cvm_null_table(alphas, J_null, replicates, seed, threads);
  write_text(out_path, to_json(table).dump(2) + "\n", out);
  return kOk;
}

int cmd_widths(const std::string& path, std::size_t i_max, double eps, std::ostream& out) {
  const auto set = set_from_json(read_json(path));
  const auto verdict = compactness_diagnostic(set, eps, i_max);
  Json j;
  j["set"] = to_json(set);
  j["diagnostic"] = to_json(verdict);
  out << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform consistency laboratory for nonparametric goodness-of-fit tests"};
  app.require_subcommand(1);

  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "Worker threads (results do not depend on this)")->check(CLI::PositiveNumber);

  std::string suite_name, config_path, out_dir = ".";
  auto* suite = app.add_subcommand("suite", "Run a canned experiment suite");
  suite->add_option("name", suite_name, "Suite name")->required();
  suite->add_option("--config", config_path, "Suite config JSON")->required();
  suite->add_option("--out", out_dir, "Output directory");
  suite->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string stat_family, data_path;
  auto* stat = app.add_subcommand("statistic", "Compute a test statistic and decision from data");
  stat->add_option("family", stat_family, "quad, kernel, chi2, cvm or fixed")
      ->required()
      ->check(CLI::IsMember({"quad", "kernel", "chi2", "cvm", "fixed"}));
  stat->add_option("--data", data_path, "Data JSON")->required();

  std::string seq_path;
  ClassifyThresholds th;
  auto* cls = app.add_subcommand("classify", "Classify an alternative sequence");
  cls->add_option("--sequence", seq_path, "Sequence JSON")->required();
  cls->add_option("--c1", th.c1, "Head mass floor")->capture_default_str();
  cls->add_option("--c2", th.c2, "Head band factor")->capture_default_str();
  cls->add_option("--eps", th.eps, "Vanishing threshold")->capture_default_str();
  cls->add_option("--C1", th.C1, "Far-tail band factor")->capture_default_str();

  std::string nt_kind, nt_out;
  std::vector<double> nt_alpha{0.05};
  std::size_t nt_reps = 100000, nt_J = 1024;
  std::uint64_t nt_seed = 1;
  auto* nt = app.add_subcommand("nulltable", "Simulate a null critical value table");
  nt->add_option("kind", nt_kind, "Table kind")->required()->check(CLI::IsMember({"cvm"}));
  nt->add_option("--alpha", nt_alpha, "Levels")->delimiter(',')->capture_default_str();
  nt->add_option("--replicates", nt_reps, "Null replicates")->capture_default_str();
  nt->add_option("--J-null", nt_J, "Series truncation")->capture_default_str();
  nt->add_option("--seed", nt_seed, "Seed")->capture_default_str();
  nt->add_option("--out", nt_out, "Output file (stdout when omitted)");

  std::string set_path;
  std::size_t i_max = 0;
  double eps = 1e-3;
  auto* widths = app.add_subcommand("widths", "Greedy widths and compactness diagnostic of a set");
  widths->add_option("--set", set_path, "Set JSON")->required();
  widths->add_option("--imax", i_max, "Number of widths (0 = dimension)");
  widths->add_option("--eps", eps, "Width threshold")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*suite) return cmd_suite(suite_name, config_path, out_dir, threads, out);
    if (*stat) return cmd_statistic(stat_family, data_path, threads, out);
    if (*cls) return cmd_classify(seq_path, th, out);
    if (*nt) return cmd_nulltable(nt_alpha, nt_reps, nt_J, nt_seed, threads.value_or(1), nt_out, out);
    if (*widths) return cmd_widths(set_path, i_max, eps, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    err << "validation error (" << e.assumption() << "): " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kValidation;
}

}  // namespace uniconsist::cli
