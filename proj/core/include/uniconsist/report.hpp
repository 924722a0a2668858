#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace uniconsist {

struct TestReport {
  std::size_t n = 0;
  double statistic = 0.0;
  double standardized = 0.0;
  bool reject = false;
  std::optional<double> predicted_beta;
  // R_n or the family's analogue of the drift term.
  std::optional<double> noncentrality;
  std::optional<double> A_n;
};

// Columns: n, statistic, reject, predicted_beta, R_n, A_n.
std::string test_report_csv_header();
std::string to_csv_row(const TestReport& report);

// Shortest round-trip decimal form; empty string for NaN/absent values.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

}  // namespace uniconsist
