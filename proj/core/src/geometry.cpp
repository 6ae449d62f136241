#include "pivotk/geometry.hpp"

#include "pivotk/error.hpp"

#include <string>

namespace pivotk {

SystemInstance SystemInstance::make(std::uint32_t lanes, std::uint32_t contacts_per_slot,
                                    std::uint32_t symbols_per_bundle, std::uint32_t decode_threshold_symbols) {
  if (lanes == 0) throw ValidationError("n (lanes) must be positive");
  if (contacts_per_slot == 0) throw ValidationError("m (contacts per slot) must be positive");
  if (symbols_per_bundle == 0) throw ValidationError("s (symbols per bundle) must be positive");
  if (decode_threshold_symbols == 0) throw ValidationError("K (decode threshold) must be positive");
  if (contacts_per_slot > lanes) {
    throw ValidationError("m = " + std::to_string(contacts_per_slot) + " exceeds n = " + std::to_string(lanes));
  }
  SystemInstance out;
  out.n_ = lanes;
  out.m_ = contacts_per_slot;
  out.s_ = symbols_per_bundle;
  out.K_ = decode_threshold_symbols;
  out.kappa_ = (decode_threshold_symbols + symbols_per_bundle - 1) / symbols_per_bundle;
  out.t_star_ = (out.kappa_ + contacts_per_slot - 1) / contacts_per_slot;
  out.slack_ = out.t_star_ * contacts_per_slot - out.kappa_;
  return out;
}

SystemInstance SystemInstance::from_kappa(std::uint32_t lanes, std::uint32_t contacts_per_slot,
                                          std::uint32_t kappa) {
  return make(lanes, contacts_per_slot, 1, kappa);
}

ContactSchedule ContactSchedule::derive(std::vector<std::uint32_t> per_slot, std::uint32_t kappa) {
  if (kappa == 0) throw ValidationError("kappa must be positive");
  ContactSchedule out;
  out.kappa_ = kappa;
  std::uint64_t total = 0;
  for (std::size_t t = 0; t < per_slot.size(); ++t) {
    total += per_slot[t];
    out.cumulative_.push_back(total);
    if (out.t_star_ == 0 && total >= kappa) {
      out.t_star_ = static_cast<std::uint32_t>(t + 1);
      out.slack_ = static_cast<std::uint32_t>(total - kappa);
    }
  }
  if (out.t_star_ == 0) {
    throw ValidationError("contact schedule totals " + std::to_string(total) + " bundles and never reaches kappa = " +
                          std::to_string(kappa));
  }
  out.per_slot_ = std::move(per_slot);
  return out;
}

ContactSchedule ContactSchedule::uniform(std::uint32_t m, std::uint32_t kappa) {
  if (m == 0) throw ValidationError("m must be positive");
  const std::uint32_t horizon = (kappa + m - 1) / m;
  return derive(std::vector<std::uint32_t>(horizon, m), kappa);
}

}  // namespace pivotk
