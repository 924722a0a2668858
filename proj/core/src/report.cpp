#include "uniconsist/report.hpp"

#include <charconv>
#include <cmath>

namespace uniconsist {

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value) { return value ? format_number(*value) : ""; }

std::string test_report_csv_header() { return "n,statistic,reject,predicted_beta,R_n,A_n"; }

std::string to_csv_row(const TestReport& r) {
  return std::to_string(r.n) + "," + format_number(r.statistic) + "," + (r.reject ? "1" : "0") + "," +
         format_optional(r.predicted_beta) + "," + format_optional(r.noncentrality) + "," + format_optional(r.A_n);
}

}  // namespace uniconsist
