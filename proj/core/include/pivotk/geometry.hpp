#pragma once

// Dissemination geometry: decode threshold in bundles, honest horizon, slack
// and final-slot deficit, for static and time-varying contact schedules.

#include <cstdint>
#include <vector>

namespace pivotk {

class SystemInstance {
 public:
  /// Throws ValidationError on zero parameters or m > n.
  static SystemInstance make(std::uint32_t lanes, std::uint32_t contacts_per_slot,
                             std::uint32_t symbols_per_bundle, std::uint32_t decode_threshold_symbols);
  /// Instance with s = 1, so K = kappa.
  static SystemInstance from_kappa(std::uint32_t lanes, std::uint32_t contacts_per_slot, std::uint32_t kappa);

  std::uint32_t n() const { return n_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t s() const { return s_; }
  std::uint32_t K() const { return K_; }

  std::uint32_t kappa() const { return kappa_; }
  std::uint32_t t_star() const { return t_star_; }
  /// Delta = t* m - kappa, in [0, m-1].
  std::uint32_t slack() const { return slack_; }
  /// r = m - Delta, bundles still needed at the start of slot t*.
  std::uint32_t final_deficit() const { return m_ - slack_; }
  /// Indices the kappa-th bundle contributes to the pivotal set, K - (kappa-1)s.
  std::uint32_t final_bundle_indices() const { return K_ - (kappa_ - 1) * s_; }
  bool knife_edge() const { return slack_ == 0; }

  friend bool operator==(const SystemInstance&, const SystemInstance&) = default;

 private:
  SystemInstance() = default;

  std::uint32_t n_ = 0;
  std::uint32_t m_ = 0;
  std::uint32_t s_ = 0;
  std::uint32_t K_ = 0;
  std::uint32_t kappa_ = 0;
  std::uint32_t t_star_ = 0;
  std::uint32_t slack_ = 0;
};

/// A finite per-slot contact schedule m_1, m_2, ...
class ContactSchedule {
 public:
  /// Throws ValidationError if no prefix sum reaches kappa.
  static ContactSchedule derive(std::vector<std::uint32_t> per_slot, std::uint32_t kappa);
  /// m contacts per slot, repeated until the horizon.
  static ContactSchedule uniform(std::uint32_t m, std::uint32_t kappa);

  const std::vector<std::uint32_t>& per_slot() const { return per_slot_; }
  /// M_t for t = 1 .. size.
  const std::vector<std::uint64_t>& cumulative() const { return cumulative_; }
  std::uint32_t kappa() const { return kappa_; }
  std::uint32_t t_star() const { return t_star_; }
  std::uint64_t planned_contacts() const { return cumulative_[t_star_ - 1]; }
  /// M_{t*} - kappa, in [0, m_{t*} - 1].
  std::uint32_t slack() const { return slack_; }
  /// Slack left for the first slot's withholdings when later slots are
  /// contacted as planned; equals slack() for a schedule that stops at t*.
  std::uint32_t recovery_slack() const { return slack_; }
  std::uint32_t first_slot_contacts() const { return per_slot_.front(); }

 private:
  ContactSchedule() = default;

  std::vector<std::uint32_t> per_slot_;
  std::vector<std::uint64_t> cumulative_;
  std::uint32_t kappa_ = 0;
  std::uint32_t t_star_ = 0;
  std::uint32_t slack_ = 0;
};

}  // namespace pivotk
