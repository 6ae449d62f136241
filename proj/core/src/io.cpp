#include "pivotk/io.hpp"

#include "pivotk/error.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace pivotk {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string(where) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

std::vector<std::uint32_t> parse_counts(const std::string& list, const std::string& spec) {
  std::vector<std::uint32_t> out;
  if (list.empty()) return out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing characters");
      out.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw ValidationError("policy '" + spec + "': expected comma-separated counts");
    }
  }
  return out;
}

double parse_rate(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double w = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    if (!(w >= 0.0 && w <= 1.0)) throw std::out_of_range("rate");
    return w;
  } catch (const std::exception&) {
    throw ValidationError("policy '" + spec + "': expected an inclusion rate in [0,1]");
  }
}

// "name(args)" -> args, or nullopt when `spec` has another form.
std::optional<std::string> call_args(const std::string& spec, const std::string& name) {
  if (spec.size() < name.size() + 2 || spec.compare(0, name.size() + 1, name + "(") != 0 || spec.back() != ')') {
    return std::nullopt;
  }
  return spec.substr(name.size() + 1, spec.size() - name.size() - 2);
}

}  // namespace

json to_json(const SystemInstance& instance) {
  return {{"n", instance.n()}, {"m", instance.m()}, {"s", instance.s()}, {"K", instance.K()}};
}

SystemInstance instance_from_json(const json& j) {
  return SystemInstance::make(field<std::uint32_t>(j, "n", "instance"), field<std::uint32_t>(j, "m", "instance"),
                              field<std::uint32_t>(j, "s", "instance"), field<std::uint32_t>(j, "K", "instance"));
}

json to_json(const EconParams& econ) {
  json j = {{"alpha", econ.alpha()},   {"value", econ.value()},   {"gamma", econ.gamma()},
            {"bounty", econ.bounty()}, {"net_nonneg", econ.net_nonneg_assumed()}};
  if (const auto& b = econ.byte_model()) {
    j["mode"] = "bytes";
    j["header_bytes"] = b->header_bytes;
    j["metadata_bytes"] = b->metadata_bytes;
    j["symbol_bytes"] = b->symbol_bytes;
    j["price_per_byte"] = b->price_per_byte;
    j["proposer_share"] = b->proposer_share;
    j["symbols_per_bundle"] = b->symbols_per_bundle;
  } else {
    j["mode"] = "normalized";
    j["proposer_fee"] = econ.proposer_fee();
    j["bundle_fee"] = econ.bundle_fee();
  }
  // Derived values, echoed for auditability.
  j["derived"] = {{"proposer_fee", econ.proposer_fee()}, {"bundle_fee", econ.bundle_fee()}, {"alpha_v", econ.alpha_v()}};
  return j;
}

EconParams econ_from_json(const json& j) {
  const char* where = "econ";
  const auto mode = field<std::string>(j, "mode", where);
  EconParams e = [&] {
    if (mode == "bytes") {
      ByteModel b;
      b.header_bytes = field<std::uint64_t>(j, "header_bytes", where);
      b.metadata_bytes = field<std::uint64_t>(j, "metadata_bytes", where);
      b.symbol_bytes = field<std::uint64_t>(j, "symbol_bytes", where);
      b.price_per_byte = field<double>(j, "price_per_byte", where);
      b.proposer_share = field<double>(j, "proposer_share", where);
      b.symbols_per_bundle = field<std::uint32_t>(j, "symbols_per_bundle", where);
      return EconParams::from_bytes(b, field<double>(j, "alpha", where), field<double>(j, "value", where),
                                    field<double>(j, "gamma", where), field<double>(j, "bounty", where));
    }
    if (mode != "normalized") throw ValidationError("econ: unknown mode '" + mode + "'");
    return EconParams::normalized(field<double>(j, "proposer_fee", where), field<double>(j, "alpha", where),
                                  field<double>(j, "value", where), field<double>(j, "gamma", where),
                                  field<double>(j, "bounty", where), field<double>(j, "bundle_fee", where));
  }();
  return e.with_net_nonneg(field<bool>(j, "net_nonneg", where));
}

json to_json(const PayoffBreakdown& p) {
  return {{"fee_revenue", p.fee_revenue},
          {"bounty_revenue", p.bounty_revenue},
          {"mev_option", p.mev_option},
          {"total", p.total}};
}

PayoffBreakdown payoff_from_json(const json& j) {
  return {field<double>(j, "fee_revenue", "payoff"), field<double>(j, "bounty_revenue", "payoff"),
          field<double>(j, "mev_option", "payoff"), field<double>(j, "total", "payoff")};
}

AdversaryPolicy parse_policy(const std::string& spec) {
  if (spec == "full_include") return policy::FullInclude{};
  if (spec == "full_withhold") return policy::FullWithhold{};
  if (spec == "minimal_sabotage") return policy::MinimalSabotage{};
  if (spec.rfind("w:", 0) == 0) return policy::StationaryW{parse_rate(spec.substr(2), spec)};
  if (auto a = call_args(spec, "stationary_w")) return policy::StationaryW{parse_rate(*a, spec)};
  if (spec.rfind("spread:", 0) == 0) return policy::RatchetSpread{parse_counts(spec.substr(7), spec)};
  if (auto a = call_args(spec, "ratchet_spread")) return policy::RatchetSpread{parse_counts(*a, spec)};
  if (spec.rfind("scripted:", 0) == 0) return policy::Scripted{parse_counts(spec.substr(9), spec)};
  if (auto a = call_args(spec, "scripted")) return policy::Scripted{parse_counts(*a, spec)};
  if (auto a = call_args(spec, "withhold_mask")) {
    policy::WithholdMask mask;
    std::stringstream ss(*a);
    std::string row;
    while (std::getline(ss, row, '|')) {
      std::vector<bool> bits;
      for (char c : row) {
        if (c != '0' && c != '1') throw ValidationError("policy '" + spec + "': mask rows are 0/1 strings");
        bits.push_back(c == '1');
      }
      mask.include.push_back(std::move(bits));
    }
    return mask;
  }
  throw ValidationError("unknown policy '" + spec +
                        "'; expected full_include, full_withhold, w:<rate>, minimal_sabotage, spread:<caps>, "
                        "or scripted:<counts>");
}

std::string_view to_string(MechanismMode mode) { return mode == MechanismMode::pivot_k ? "pivot_k" : "fees_only"; }

MechanismMode parse_mechanism_mode(const std::string& text) {
  if (text == "pivot_k") return MechanismMode::pivot_k;
  if (text == "fees_only") return MechanismMode::fees_only;
  throw ValidationError("unknown mechanism mode '" + text + "'; expected pivot_k or fees_only");
}

json to_json(const TraceRecord& r) {
  const Trace& t = r.trace;
  json bundles = json::array();
  for (const auto& b : t.bundles) {
    bundles.push_back({b.slot, b.lane, b.ticket_id, b.ticket_hash, b.owner == Owner::cartel ? 1 : 0,
                       b.admissible ? 1 : 0});
  }
  json slots = json::array();
  for (const auto& s : t.slots) slots.push_back({s.cartel_contacts, s.honest_contacts, s.cartel_included});
  return {{"instance", to_json(t.instance)},
          {"beta", t.beta},
          {"seed", t.seed},
          {"policy", t.policy},
          {"truncated", t.truncated},
          {"bundles", bundles},
          {"slots", slots},
          {"inclusion_time", t.inclusion_time},
          {"withheld_at_horizon", t.withheld_at_horizon},
          {"pivotal_cartel_count", t.pivotal_cartel_count},
          {"delayed", t.delayed},
          {"econ", to_json(r.econ)},
          {"mode", std::string(to_string(r.mode))},
          {"payoff", to_json(r.payoff)}};
}

TraceRecord trace_record_from_json(const json& j) {
  const char* where = "trace";
  const auto instance = instance_from_json(field<json>(j, "instance", where));
  std::vector<BundleRecord> bundles;
  for (const auto& b : field<json>(j, "bundles", where)) {
    if (!b.is_array() || b.size() != 6) throw ValidationError("trace: malformed bundle entry");
    BundleRecord rec;
    rec.slot = b[0].get<std::uint32_t>();
    rec.lane = b[1].get<std::uint32_t>();
    rec.ticket_id = b[2].get<std::uint64_t>();
    rec.ticket_hash = b[3].get<std::uint64_t>();
    rec.owner = b[4].get<int>() ? Owner::cartel : Owner::honest;
    rec.admissible = b[5].get<int>() != 0;
    if (rec.slot == 0) throw ValidationError("trace: slots are 1-based");
    bundles.push_back(rec);
  }
  Trace trace = rebuild_trace(instance, field<double>(j, "beta", where), field<std::uint64_t>(j, "seed", where),
                              field<std::string>(j, "policy", where), std::move(bundles),
                              field<bool>(j, "truncated", where));
  if (trace.inclusion_time != field<std::uint32_t>(j, "inclusion_time", where) ||
      trace.withheld_at_horizon != field<std::uint32_t>(j, "withheld_at_horizon", where) ||
      trace.pivotal_cartel_count != field<std::uint32_t>(j, "pivotal_cartel_count", where) ||
      trace.delayed != field<bool>(j, "delayed", where)) {
    throw ValidationError("trace: stored summary fields disagree with the stored bundles");
  }
  return TraceRecord{std::move(trace), econ_from_json(field<json>(j, "econ", where)),
                     parse_mechanism_mode(field<std::string>(j, "mode", where)),
                     payoff_from_json(field<json>(j, "payoff", where))};
}

void write_jsonl(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<TraceRecord> read_jsonl(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trace_record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ValidationError("trace line " + std::to_string(number) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("trace line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

ReplayResult replay(const std::vector<TraceRecord>& records) {
  ReplayResult result;
  for (const auto& r : records) {
    ++result.records;
    const auto again = payoff_of_trace(r.trace, r.econ, r.mode);
    if (again.fee_revenue != r.payoff.fee_revenue || again.bounty_revenue != r.payoff.bounty_revenue ||
        again.mev_option != r.payoff.mev_option || again.total != r.payoff.total) {
      ++result.payoff_mismatches;
      result.messages.push_back("record " + std::to_string(result.records) + ": payoff differs (stored total " +
                                json(r.payoff.total).dump() + ", recomputed " + json(again.total).dump() + ")");
    }
    const auto resimulated = run_trace(r.trace.instance, r.trace.beta, parse_policy(r.trace.policy), r.trace.seed);
    if (resimulated.bundles != r.trace.bundles) {
      ++result.trace_mismatches;
      result.messages.push_back("record " + std::to_string(result.records) +
                                ": re-simulation from the stored seed produced a different trace");
    }
  }
  return result;
}

}  // namespace pivotk
