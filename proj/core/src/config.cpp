#include "pivotk/config.hpp"

#include "pivotk/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pivotk {

using nlohmann::json;

EconParams EconConfig::build(std::uint32_t symbols_per_bundle) const {
  EconParams e = [&] {
    if (mode == Mode::normalized) return EconParams::normalized(proposer_fee, alpha, value, gamma, bounty, bundle_fee);
    ByteModel b = bytes;
    b.symbols_per_bundle = symbols_per_bundle;
    return EconParams::from_bytes(b, alpha, value, gamma, bounty);
  }();
  return e.with_net_nonneg(net_nonneg);
}

bool operator==(const EconConfig& a, const EconConfig& b) {
  auto bytes_equal = [](const ByteModel& x, const ByteModel& y) {
    return x.header_bytes == y.header_bytes && x.metadata_bytes == y.metadata_bytes &&
           x.symbol_bytes == y.symbol_bytes && x.price_per_byte == y.price_per_byte &&
           x.proposer_share == y.proposer_share;
  };
  if (a.mode != b.mode || a.alpha != b.alpha || a.value != b.value || a.gamma != b.gamma || a.bounty != b.bounty ||
      a.net_nonneg != b.net_nonneg) {
    return false;
  }
  if (a.mode == EconConfig::Mode::normalized) return a.proposer_fee == b.proposer_fee && a.bundle_fee == b.bundle_fee;
  return bytes_equal(a.bytes, b.bytes);
}

RaceModel RaceConfig::build() const {
  ArrivalCdf cdf = arrival == Arrival::exponential ? ArrivalCdf::exponential(rate, seal_deadline, renormalize)
                                                   : ArrivalCdf::piecewise_linear(knots);
  return RaceModel(slot_duration, seal_deadline, reaction_time, std::move(cdf));
}

SystemInstance AnalysisConfig::instance_for_kappa(std::uint32_t kappa) const {
  return SystemInstance::make(n, m, s, kappa * s);
}

std::vector<SystemInstance> AnalysisConfig::instances() const {
  std::vector<SystemInstance> out;
  out.reserve(thresholds.size());
  for (std::uint32_t t : thresholds) {
    out.push_back(threshold_kind == ThresholdKind::kappa ? instance_for_kappa(t) : SystemInstance::make(n, m, s, t));
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config." + path + ": " + what);
}

// Typed access to one JSON object, rejecting unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(where(), "expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.count(key)) fail(field(key), "unknown field");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    if (!at(key).is_number()) fail(field(key), "expected a number");
    out = at(key).get<double>();
  }
  void optional_number(const std::string& key, std::optional<double>& out) const {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    out = v;
  }
  template <typename U>
  void count(const std::string& key, U& out) const {
    if (!has(key)) return;
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(field(key), "expected a nonnegative integer");
    }
    const auto raw = v.get<std::uint64_t>();
    if (raw > std::numeric_limits<U>::max()) fail(field(key), "value too large");
    out = static_cast<U>(raw);
  }
  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    if (!at(key).is_boolean()) fail(field(key), "expected true or false");
    out = at(key).get<bool>();
  }
  void text(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    if (!at(key).is_string()) fail(field(key), "expected a string");
    out = at(key).get<std::string>();
  }
  void counts(const std::string& key, std::vector<std::uint32_t>& out) const {
    if (!has(key)) return;
    if (!at(key).is_array()) fail(field(key), "expected an array of positive integers");
    out.clear();
    for (const auto& v : at(key)) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0 ||
          v.get<std::uint64_t>() > std::numeric_limits<std::uint32_t>::max()) {
        fail(field(key), "expected an array of positive integers");
      }
      out.push_back(v.get<std::uint32_t>());
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
};

}  // namespace

void AnalysisConfig::validate() const {
  if (n == 0) fail("instance.n", "must be positive");
  if (m == 0) fail("instance.m", "must be positive");
  if (m > n) fail("instance.m", "cannot exceed n");
  if (s == 0) fail("instance.s", "must be positive");
  if (thresholds.empty()) fail(threshold_kind == ThresholdKind::kappa ? "instance.kappa" : "instance.K", "must not be empty");
  if (!(beta >= 0.0 && beta < 1.0)) fail("beta", "must lie in [0,1)");
  try {
    (void)cartel_size(n, beta);
  } catch (const ValidationError& e) {
    fail("beta", e.what());
  }
  try {
    for (const auto& inst : instances()) (void)inst;
  } catch (const ValidationError& e) {
    fail("instance", e.what());
  }
  try {
    (void)econ_params();
  } catch (const ValidationError& e) {
    fail("econ", e.what());
  }
  if (!(usd_per_unit > 0.0)) fail("usd_per_unit", "must be positive");
  for (std::size_t i = 0; i < mev_tiers.size(); ++i) {
    if (!(mev_tiers[i].alpha_v_usd > 0.0)) fail("mev_tiers[" + std::to_string(i) + "].alpha_v_usd", "must be positive");
  }
  if (operating_kappa == 0) fail("operating_kappa", "must be positive");
  if (sweep_first == 0 || sweep_first > sweep_last) fail("sweep", "range must satisfy 1 <= first <= last");
  if (trials == 0) fail("mc.trials", "must be positive");
  if (verify_paths == 0) fail("mc.verify_paths", "must be positive");
  if (sweep_trials == 0) fail("mc.sweep_trials", "must be positive");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) fail("ratchet.epsilon", "must lie in [0,1)");
  try {
    (void)race.build();
  } catch (const ValidationError& e) {
    fail("race", e.what());
  }
}

json to_json(const AnalysisConfig& c) {
  json instance = {{"n", c.n}, {"m", c.m}, {"s", c.s}};
  instance[c.threshold_kind == ThresholdKind::kappa ? "kappa" : "K"] = c.thresholds;

  json econ = {{"alpha", c.econ.alpha},
               {"value", c.econ.value},
               {"gamma", c.econ.gamma},
               {"bounty", c.econ.bounty},
               {"net_nonneg", c.econ.net_nonneg}};
  if (c.econ.mode == EconConfig::Mode::normalized) {
    econ["mode"] = "normalized";
    econ["proposer_fee"] = c.econ.proposer_fee;
    if (c.econ.bundle_fee) econ["bundle_fee"] = *c.econ.bundle_fee;
  } else {
    econ["mode"] = "bytes";
    econ["header_bytes"] = c.econ.bytes.header_bytes;
    econ["metadata_bytes"] = c.econ.bytes.metadata_bytes;
    econ["symbol_bytes"] = c.econ.bytes.symbol_bytes;
    econ["price_per_byte"] = c.econ.bytes.price_per_byte;
    econ["proposer_share"] = c.econ.bytes.proposer_share;
  }

  json tiers = json::array();
  for (const auto& t : c.mev_tiers) tiers.push_back({{"name", t.name}, {"alpha_v_usd", t.alpha_v_usd}});

  json race = {{"slot_duration", c.race.slot_duration},
               {"seal_deadline", c.race.seal_deadline},
               {"reaction_time", c.race.reaction_time}};
  if (c.race.arrival == RaceConfig::Arrival::exponential) {
    race["arrival"] = {{"kind", "exponential"}, {"rate", c.race.rate}, {"renormalize", c.race.renormalize}};
  } else {
    json knots = json::array();
    for (const auto& [x, f] : c.race.knots) knots.push_back({x, f});
    race["arrival"] = {{"kind", "piecewise"}, {"knots", knots}};
  }

  json out = {{"instance", instance},
              {"beta", c.beta},
              {"econ", econ},
              {"usd_per_unit", c.usd_per_unit},
              {"mev_tiers", tiers},
              {"operating_kappa", c.operating_kappa},
              {"sweep", {{"first", c.sweep_first}, {"last", c.sweep_last}}},
              {"mc",
               {{"trials", c.trials}, {"seed", c.seed}, {"verify_paths", c.verify_paths}, {"sweep_trials", c.sweep_trials}}},
              {"ratchet", {{"epsilon", c.epsilon}}},
              {"race", race}};
  out["outputs"] = {{"traces", c.trace_output ? json(*c.trace_output) : json(nullptr)}};
  return out;
}

AnalysisConfig config_from_json(const json& j) {
  AnalysisConfig c;
  const Reader root(j, "",
                    {"instance", "beta", "econ", "usd_per_unit", "mev_tiers", "operating_kappa", "sweep", "mc",
                     "ratchet", "race", "outputs"});
  if (root.has("instance")) {
    const Reader r(root.at("instance"), "instance", {"n", "m", "s", "K", "kappa"});
    r.count("n", c.n);
    r.count("m", c.m);
    r.count("s", c.s);
    if (r.has("K") == r.has("kappa")) {
      if (r.has("K")) fail("instance", "give exactly one of K or kappa, not both");
      // neither given: keep the default kappa list
    } else if (r.has("K")) {
      c.threshold_kind = ThresholdKind::symbols;
      r.counts("K", c.thresholds);
    } else {
      c.threshold_kind = ThresholdKind::kappa;
      r.counts("kappa", c.thresholds);
    }
  }
  root.number("beta", c.beta);
  if (root.has("econ")) {
    const json& ej = root.at("econ");
    std::string mode = "normalized";
    if (ej.is_object() && ej.contains("mode")) {
      if (!ej.at("mode").is_string()) fail("econ.mode", "expected \"normalized\" or \"bytes\"");
      mode = ej.at("mode").get<std::string>();
    }
    const std::set<std::string> common{"mode", "alpha", "value", "gamma", "bounty", "net_nonneg"};
    const std::set<std::string> byte_fields{"header_bytes", "metadata_bytes", "symbol_bytes", "price_per_byte",
                                            "proposer_share"};
    std::set<std::string> allowed = common;
    if (mode == "normalized") {
      c.econ.mode = EconConfig::Mode::normalized;
      if (ej.is_object()) {
        for (const auto& f : byte_fields) {
          if (ej.contains(f)) fail("econ." + f, "byte-model field not allowed in normalized mode");
        }
      }
      allowed.insert({"proposer_fee", "bundle_fee"});
    } else if (mode == "bytes") {
      c.econ.mode = EconConfig::Mode::bytes;
      if (ej.is_object() && (ej.contains("proposer_fee") || ej.contains("bundle_fee"))) {
        fail("econ", "bytes mode derives proposer_fee and bundle_fee; do not set them");
      }
      allowed.insert(byte_fields.begin(), byte_fields.end());
    } else {
      fail("econ.mode", "expected \"normalized\" or \"bytes\"");
    }
    const Reader r(ej, "econ", allowed);
    r.number("alpha", c.econ.alpha);
    r.number("value", c.econ.value);
    r.number("gamma", c.econ.gamma);
    r.number("bounty", c.econ.bounty);
    r.boolean("net_nonneg", c.econ.net_nonneg);
    r.number("proposer_fee", c.econ.proposer_fee);
    r.optional_number("bundle_fee", c.econ.bundle_fee);
    r.count("header_bytes", c.econ.bytes.header_bytes);
    r.count("metadata_bytes", c.econ.bytes.metadata_bytes);
    r.count("symbol_bytes", c.econ.bytes.symbol_bytes);
    r.number("price_per_byte", c.econ.bytes.price_per_byte);
    r.number("proposer_share", c.econ.bytes.proposer_share);
  }
  root.number("usd_per_unit", c.usd_per_unit);
  if (root.has("mev_tiers")) {
    const json& tj = root.at("mev_tiers");
    if (!tj.is_array()) fail("mev_tiers", "expected an array");
    c.mev_tiers.clear();
    for (std::size_t i = 0; i < tj.size(); ++i) {
      const Reader r(tj[i], "mev_tiers[" + std::to_string(i) + "]", {"name", "alpha_v_usd"});
      MevTier t;
      r.text("name", t.name);
      r.number("alpha_v_usd", t.alpha_v_usd);
      c.mev_tiers.push_back(t);
    }
  }
  root.count("operating_kappa", c.operating_kappa);
  if (root.has("sweep")) {
    const Reader r(root.at("sweep"), "sweep", {"first", "last"});
    r.count("first", c.sweep_first);
    r.count("last", c.sweep_last);
  }
  if (root.has("mc")) {
    const Reader r(root.at("mc"), "mc", {"trials", "seed", "verify_paths", "sweep_trials"});
    r.count("trials", c.trials);
    r.count("seed", c.seed);
    r.count("verify_paths", c.verify_paths);
    r.count("sweep_trials", c.sweep_trials);
  }
  if (root.has("ratchet")) {
    const Reader r(root.at("ratchet"), "ratchet", {"epsilon"});
    r.number("epsilon", c.epsilon);
  }
  if (root.has("race")) {
    const Reader r(root.at("race"), "race", {"slot_duration", "seal_deadline", "reaction_time", "arrival"});
    r.number("slot_duration", c.race.slot_duration);
    r.number("seal_deadline", c.race.seal_deadline);
    r.number("reaction_time", c.race.reaction_time);
    if (r.has("arrival")) {
      const Reader a(r.at("arrival"), "race.arrival", {"kind", "rate", "renormalize", "knots"});
      std::string kind = "exponential";
      a.text("kind", kind);
      if (kind == "exponential") {
        c.race.arrival = RaceConfig::Arrival::exponential;
        a.number("rate", c.race.rate);
        a.boolean("renormalize", c.race.renormalize);
      } else if (kind == "piecewise") {
        c.race.arrival = RaceConfig::Arrival::piecewise;
        if (!a.has("knots") || !a.at("knots").is_array()) fail("race.arrival.knots", "expected [[x, F], ...]");
        c.race.knots.clear();
        for (const auto& k : a.at("knots")) {
          if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
            fail("race.arrival.knots", "expected [[x, F], ...]");
          }
          c.race.knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
      } else {
        fail("race.arrival.kind", "expected \"exponential\" or \"piecewise\"");
      }
    }
  }
  if (root.has("outputs")) {
    const Reader r(root.at("outputs"), "outputs", {"traces"});
    if (r.has("traces")) {
      std::string path;
      r.text("traces", path);
      c.trace_output = path;
    }
  }
  c.validate();
  return c;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace pivotk
