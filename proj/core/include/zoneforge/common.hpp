#pragma once

#include <stdexcept>
#include <string>

namespace zoneforge {

/// Input, schema or configuration problem. Mapped to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (rank deficiency, non-stationarity, ...). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quarters are encoded as year*4 + q with q in 0..3. All intervals over
// quarters are half-open [from, to).
using Quarter = int;

Quarter make_quarter(int year, int q_1to4);
int quarter_year(Quarter q);
int quarter_of_year(Quarter q);  // 1..4

/// Parses "2005Q1". Throws ValidationError on malformed input.
Quarter parse_quarter(const std::string& text);
std::string format_quarter(Quarter q);

}  // namespace zoneforge
