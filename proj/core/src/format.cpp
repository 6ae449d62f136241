#include "pivotk/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <system_error>

namespace pivotk::fmt {

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string scientific_2sig(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", p);
  std::string s(buf);
  // "8.0e-05" -> "8.0e-5"
  const auto e = s.find('e');
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  const bool negative = exp.front() == '-';
  exp.erase(0, 1);
  exp.erase(0, std::min(exp.find_first_not_of('0'), exp.size() - 1));
  return mant + "e" + (negative ? "-" : "") + exp;
}

}  // namespace

std::string probability(double p) {
  if (p > 1.0 - 1e-4) return "~1";
  if (p == 0.0) return "0";
  if (p < 1e-2) return scientific_2sig(p);
  return fixed(p, 3);
}

double displayed_probability(double p) {
  const std::string s = probability(p);
  if (s == "~1") return 1.0;
  return std::stod(s);
}

std::string bounty_units(double b) {
  if (std::abs(b) < 1.0) return fixed(b, 2);
  return grouped(b);
}

double displayed_bounty(double b) {
  if (std::abs(b) < 1.0) return std::stod(fixed(b, 2));
  return std::round(b);
}

std::string usd_cents(double usd) {
  if (std::round(usd * 100.0) == 0.0) return "~$0";
  return "$" + fixed(usd, 2);
}

std::string usd_scaled(double usd) {
  if (usd < 0.01) return "$" + fixed(usd, 3);
  if (usd < 10.0) return "$" + fixed(usd, 2);
  return "$" + grouped(usd);
}

std::string usd_tier(double usd) {
  if (usd == std::round(usd)) return "$" + grouped(usd);
  return "$" + fixed(usd, 2);
}

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);  // no "-0.00"
  return s;
}

std::string grouped(double x) {
  const long long v = std::llround(x);
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return (v < 0 ? "-" : "") + out;
}

std::string percent(double fraction, int decimals) { return fixed(fraction * 100.0, decimals) + "%"; }

std::string TextTable::render() const {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string();
      if (c) os << "  ";
      os << std::string(width[c] - cell.size(), ' ') << cell;
    }
    os << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
  os << std::string(total, '-') << '\n';
  for (const auto& row : rows) line(row);
  return os.str();
}

std::string TextTable::render_csv() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) os << ',';
      const bool quote = cells[c].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        os << cells[c];
        continue;
      }
      os << '"';
      for (char ch : cells[c]) os << (ch == '"' ? "\"\"" : std::string(1, ch));
      os << '"';
    }
    os << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
  return os.str();
}

}  // namespace pivotk::fmt
