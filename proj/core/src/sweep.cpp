#include "pivotk/sweep.hpp"

#include "pivotk/delay.hpp"
#include "pivotk/error.hpp"
#include "pivotk/geometry.hpp"
#include "pivotk/intra_slot.hpp"
#include "pivotk/ratchet.hpp"

namespace pivotk {

std::vector<SweepRow> sawtooth_sweep(std::uint32_t n, std::uint32_t m, double beta, std::uint32_t first,
                                     std::uint32_t last) {
  if (first == 0 || first > last) throw ValidationError("sweep range must satisfy 1 <= first <= last");
  std::vector<SweepRow> rows;
  rows.reserve(last - first + 1);
  for (std::uint32_t kappa = first; kappa <= last; ++kappa) {
    const auto instance = SystemInstance::from_kappa(n, m, kappa);
    SweepRow row;
    row.kappa = kappa;
    row.t_star = instance.t_star();
    row.delta = instance.slack();
    row.q0 = exact_q0(instance, beta);
    row.q_rat = q_rat_first_slot(ContactSchedule::uniform(m, kappa), n, beta).value;
    row.q_micro = q_micro(instance, beta).value;
    row.knife_edge = instance.knife_edge();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pivotk
