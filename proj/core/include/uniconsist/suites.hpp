#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uniconsist/json_io.hpp"
#include "uniconsist/mc.hpp"

namespace uniconsist {

// Test family built from the "family" block of a suite config.
struct FamilySetup {
  Family family = Family::Quad;
  double r = 0.25;
  double alpha = 0.05;
  std::vector<std::size_t> n_list;
  double sigma = 1.0;
  std::optional<KappaProfile> profile;
  Kernel kernel = Kernel::epanechnikov();
  std::string h_rule = "n^{4r-2}";
  double h_const = 1.0;
  double kernel_J_factor = 8.0;
  std::optional<Chi2Config> chi2;
  std::optional<CvmNullTable> cvm_table;
  std::optional<FixedKappa> fixed;
  double fixed_critical = 0.0;

  std::unique_ptr<FamilyTest> make_test(std::size_t n) const;
  double bandwidth(std::size_t n) const;
  std::size_t k_n(std::size_t n) const;
  const KappaProfile* profile_ptr() const noexcept { return profile ? &*profile : nullptr; }
};

FamilySetup parse_family(const Json& config, const MCConfig& mc);
MCConfig parse_mc(const Json& config);

struct SuiteCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "=="
  bool passed = false;
};

struct SuiteRow {
  std::string family;
  std::string scenario;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double rate_se = 0.0;
  double empirical_alpha = 0.0;
  std::optional<double> empirical_beta;
  std::optional<double> predicted_beta;
  std::optional<double> abs_gap;
  std::optional<bool> within_band;
  std::optional<double> index;
  std::optional<double> paired_diff;
  std::optional<double> paired_se;
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteRow> rows;
  std::vector<SuiteCheck> checks;
  Json details = Json::object();
  bool passed = true;

  std::string csv() const;
  Json summary(const Json& config) const;
};

std::vector<std::string> available_suites();
// Throws PreconditionError listing the available suites for unknown names.
// `threads` overrides the config's thread count.
SuiteResult run_suite(const std::string& name, const Json& config, std::optional<std::size_t> threads = std::nullopt);
// Writes <dir>/<suite>.csv and <dir>/<suite>_summary.json.
void write_suite_outputs(const SuiteResult& result, const Json& config, const std::filesystem::path& dir);

std::string suite_csv_header();

}  // namespace uniconsist
