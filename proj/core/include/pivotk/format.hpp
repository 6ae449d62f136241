#pragma once

// Display rules for the report tables, plus a small text-table renderer.

#include <string>
#include <vector>

namespace pivotk::fmt {

/// Shortest decimal string that round-trips to the same double.
std::string shortest(double x);

/// "~1" above 1 - 1e-4, "8.0e-5" below 1e-2, otherwise three decimals.
std::string probability(double p);
/// Numeric value of what probability() prints ("~1" reads as 1).
double displayed_probability(double p);

/// Two decimals below 1, otherwise a whole number with thousands separators.
std::string bounty_units(double b);
/// Value of what bounty_units() prints.
double displayed_bounty(double b);

/// "~$0" when the cents round to zero, otherwise "$49.70".
std::string usd_cents(double usd);
/// "$0.002" below a cent, "$3.40" below ten dollars, "$3,400" above.
std::string usd_scaled(double usd);
/// "$5,000"; two decimals only when the amount is not whole.
std::string usd_tier(double usd);

std::string fixed(double x, int decimals);
/// Nearest integer with thousands separators.
std::string grouped(double x);
/// 4e-4 -> "0.04%"
std::string percent(double fraction, int decimals = 2);

struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Right-aligned columns separated by two spaces, with a rule under the
  /// header.
  std::string render() const;
  std::string render_csv() const;
};

}  // namespace pivotk::fmt
