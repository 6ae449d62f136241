#pragma once

// The kappa sawtooth: exact delay, ratchet and within-slot tails per kappa.

#include <cstdint>
#include <vector>

namespace pivotk {

struct SweepRow {
  std::uint32_t kappa = 0;
  std::uint32_t t_star = 0;
  std::uint32_t delta = 0;
  double q0 = 0.0;
  double q_rat = 0.0;
  double q_micro = 0.0;
  bool knife_edge = false;
};

/// Rows for kappa = first..last inclusive. Throws on an empty range.
std::vector<SweepRow> sawtooth_sweep(std::uint32_t n, std::uint32_t m, double beta, std::uint32_t first,
                                     std::uint32_t last);

}  // namespace pivotk
