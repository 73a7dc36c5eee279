#include "zoneforge/common.hpp"

#include <cctype>
#include <cstdio>

namespace zoneforge {

Quarter make_quarter(int year, int q_1to4) {
  if (q_1to4 < 1 || q_1to4 > 4)
    throw ValidationError("quarter of year must be 1..4, got " + std::to_string(q_1to4));
  return year * 4 + (q_1to4 - 1);
}

int quarter_year(Quarter q) { return q >= 0 ? q / 4 : -((-q + 3) / 4); }

int quarter_of_year(Quarter q) {
  int r = q % 4;
  if (r < 0) r += 4;
  return r + 1;
}

Quarter parse_quarter(const std::string& text) {
  // YYYYQn, e.g. 2005Q1
  size_t qpos = text.find_first_of("Qq");
  if (qpos == std::string::npos || qpos == 0 || qpos + 2 != text.size())
    throw ValidationError("malformed quarter '" + text + "' (expected YYYYQn)");
  for (size_t i = 0; i < qpos; ++i)
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw ValidationError("malformed quarter '" + text + "' (expected YYYYQn)");
  int year = std::stoi(text.substr(0, qpos));
  char qc = text[qpos + 1];
  if (qc < '1' || qc > '4')
    throw ValidationError("malformed quarter '" + text + "' (quarter must be 1..4)");
  return make_quarter(year, qc - '0');
}

std::string format_quarter(Quarter q) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04dQ%d", quarter_year(q), quarter_of_year(q));
  return buf;
}

}  // namespace zoneforge
