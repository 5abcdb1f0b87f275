#include "ponsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "ponsim/errors.hpp"

namespace ponsim {

using nlohmann::json;

double ScenarioConfig::guaranteed(std::uint32_t onu) const {
  if (!guaranteed_bps.empty()) return guaranteed_bps.at(onu);
  return capacity_bps() / n_onus;
}

std::uint64_t ScenarioConfig::wmax_bytes(std::uint32_t onu) const {
  return SlaProfile::wmax_for(guaranteed(onu), max_cycle);
}

std::vector<std::uint32_t> ScenarioConfig::fl_clients() const {
  std::vector<std::uint32_t> out;
  if (!traffic.fl) return out;
  const std::uint32_t n =
      traffic.fl_spec.clients == 0 ? n_onus : std::min(traffic.fl_spec.clients, n_onus);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(i);
  return out;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError(what); };
  if (n_onus == 0) fail("n_onus must be at least 1");
  if (n_wavelengths == 0) fail("n_wavelengths must be at least 1");
  if (line_rate_bps == 0) fail("line_rate_gbps must be positive");
  if (guard.count() < 0) fail("guard_us must be non-negative");
  if (rtt_min.count() <= 0 || rtt_max < rtt_min) fail("rtt range must satisfy 0 < min <= max");
  if (duration.count() <= 0) fail("duration_s must be positive");
  if (warmup.count() < 0 || warmup >= duration) fail("warmup_s must lie in [0, duration_s)");
  if (replications == 0) fail("replications must be at least 1");
  if (loads.empty()) fail("loads must not be empty");
  for (double l : loads) {
    if (!(l > 0.0 && l <= 1.5)) fail("each load must lie in (0, 1.5]");
  }
  if (!guaranteed_bps.empty()) {
    if (guaranteed_bps.size() != n_onus) fail("guaranteed_gbps needs one entry per ONU");
    double sum = 0.0;
    for (double g : guaranteed_bps) {
      if (!(g > 0.0)) fail("guaranteed rates must be positive");
      sum += g;
    }
    if (sum > capacity_bps() * (1.0 + 1e-12)) fail("guaranteed rates exceed the PON capacity");
  }
  scheduler.validate(line_rate_bps);
  for (auto k : scheduler.wavelength.msd_map) {
    if (k >= n_wavelengths) fail("msd_map names a missing wavelength");
  }
  const std::uint64_t slice =
      scheduler.kind == SchedulerKind::MwBs
          ? slice_bytes_per_cycle(scheduler.theta, scheduler.max_cycle, line_rate_bps)
          : 0;
  for (std::uint32_t i = 0; i < n_onus; ++i) {
    const std::uint64_t w = wmax_bytes(i);
    const std::uint64_t share = (slice + n_onus - 1) / n_onus;
    if (w < share + kMaxWireFrame) fail("window limit too small to carry a maximum-size frame");
  }
  if (scheduler.max_cycle != max_cycle) fail("scheduler max_cycle disagrees with max_cycle_ms");
  if (scheduler.guard != guard) fail("scheduler guard disagrees with guard_us");
  traffic.cbr.validate();
  auto p = traffic.pareto;
  p.target_rate_bps = 0.0;
  p.validate();
  traffic.fl_spec.validate();
  std::set<std::uint32_t> seen;
  for (const auto& g : groups) {
    if (g.members.empty()) fail("an SLA group needs members");
    for (auto m : g.members) {
      if (m >= n_onus) fail("group member outside the ONU range");
      if (!seen.insert(m).second) fail("an ONU belongs to more than one SLA group");
    }
  }
  if (!groups.empty() && scheduler.kind == SchedulerKind::MwBs) {
    fail("SLA groups are not combined with MW_BS");
  }
  if (reservoir == 1) fail("reservoir must be 0 (keep all) or at least 2");
}

ScenarioConfig default_config() { return ScenarioConfig{}; }

namespace {

SimTime scaled(double v, double ns_per_unit) {
  return SimTime{static_cast<std::int64_t>(std::llround(v * ns_per_unit))};
}

double unscaled(SimTime t, double ns_per_unit) {
  return static_cast<double>(t.count()) / ns_per_unit;
}

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + " must be an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) unused_.insert(it.key());
  }

  /// Rejects keys that no getter consumed.
  void finish() const {
    if (!unused_.empty()) throw ValidationError("unknown key " + qualify(*unused_.begin()));
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!take(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(qualify(key) + " has the wrong type");
    }
  }

  void time(const char* key, SimTime& out, double ns_per_unit) {
    double v = unscaled(out, ns_per_unit);
    get(key, v);
    out = scaled(v, ns_per_unit);
  }

  const json* child(const char* key) { return take(key) ? &j_.at(key) : nullptr; }
  std::string qualify(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  bool take(const char* key) {
    if (!j_.contains(key)) return false;
    unused_.erase(key);
    return true;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> unused_;
};

template <typename E, typename Parse>
void get_enum(Reader& r, const char* key, E& out, Parse parse) {
  std::string s;
  r.get(key, s);
  if (s.empty()) return;
  auto v = parse(s);
  if (!v) throw ValidationError(r.qualify(key) + " has unknown value '" + s + "'");
  out = *v;
}

void read_traffic(const json& j, TrafficConfig& t) {
  Reader r(j, "traffic");
  std::uint16_t overhead = t.cbr.overhead_bytes;
  r.get("overhead_bytes", overhead);
  t.cbr.overhead_bytes = overhead;
  t.pareto.overhead_bytes = overhead;
  t.fl_spec.overhead_bytes = overhead;
  if (const json* c = r.child("dc")) {
    Reader d(*c, "traffic.dc");
    d.get("enabled", t.dc);
    d.get("packet_bytes", t.cbr.packet_bytes);
    d.time("interarrival_us", t.cbr.interarrival, 1e3);
    d.finish();
  }
  if (const json* c = r.child("ds")) {
    Reader d(*c, "traffic.ds");
    d.get("enabled", t.ds);
    d.finish();
  }
  if (const json* c = r.child("be")) {
    Reader d(*c, "traffic.be");
    d.get("enabled", t.be);
    d.finish();
  }
  if (const json* c = r.child("pareto")) {
    Reader p(*c, "traffic.pareto");
    auto& s = t.pareto;
    p.get("hurst", s.hurst);
    double mean_on_ms = static_cast<double>(s.mean_on.count()) / 1e6;
    p.get("mean_on_ms", mean_on_ms);
    s.mean_on = from_micros(mean_on_ms * 1e3);
    p.get("duty", s.duty);
    p.get("burst_shape", s.burst_shape);
    p.get("burst_min_bytes", s.burst_min);
    p.get("burst_max_bytes", s.burst_max);
    p.finish();
  }
  if (const json* c = r.child("fl")) {
    Reader f(*c, "traffic.fl");
    auto& s = t.fl_spec;
    f.get("enabled", t.fl);
    f.get("payload_bytes", s.payload_bytes_per_round);
    f.get("clients", s.clients);
    f.time("compute_min_s", s.compute_min, 1e9);
    f.time("compute_max_s", s.compute_max, 1e9);
    f.time("downstream_ms", s.downstream_delay, 1e6);
    f.time("aggregation_ms", s.aggregation_delay, 1e6);
    f.time("sync_window_s", s.sync_window, 1e9);
    f.finish();
  }
  r.finish();
}

void read_config(const json& j, ScenarioConfig& c) {
  Reader r(j, "");
  r.get("scenario", c.scenario);
  r.get("n_onus", c.n_onus);
  r.get("n_wavelengths", c.n_wavelengths);
  double rate = static_cast<double>(c.line_rate_bps) / 1e9;
  r.get("line_rate_gbps", rate);
  if (!(rate > 0.0)) throw ValidationError("line_rate_gbps must be positive");
  c.line_rate_bps = static_cast<std::uint64_t>(std::llround(rate * 1e9));
  r.time("guard_us", c.guard, 1e3);
  r.time("max_cycle_ms", c.max_cycle, 1e6);
  r.time("rtt_min_us", c.rtt_min, 1e3);
  r.time("rtt_max_us", c.rtt_max, 1e3);
  r.time("duration_s", c.duration, 1e9);
  r.time("warmup_s", c.warmup, 1e9);
  r.get("replications", c.replications);
  r.get("master_seed", c.master_seed);
  std::vector<double> g;
  for (double v : c.guaranteed_bps) g.push_back(v / 1e9);
  r.get("guaranteed_gbps", g);
  c.guaranteed_bps.clear();
  for (double v : g) c.guaranteed_bps.push_back(v * 1e9);
  r.get("loads", c.loads);
  r.get("buffer_bytes", c.buffer_bytes);
  r.get("reservoir", c.reservoir);
  c.scheduler.max_cycle = c.max_cycle;
  c.scheduler.guard = c.guard;
  if (const json* s = r.child("scheduler")) {
    Reader sr(*s, "scheduler");
    get_enum(sr, "kind", c.scheduler.kind, parse_scheduler_kind);
    get_enum(sr, "priority", c.scheduler.priority, parse_priority_policy);
    sr.get("theta", c.scheduler.theta);
    get_enum(sr, "wavelength_policy", c.scheduler.wavelength.kind, parse_wavelength_policy);
    sr.get("msd_map", c.scheduler.wavelength.msd_map);
    sr.finish();
  }
  if (const json* t = r.child("traffic")) read_traffic(*t, c.traffic);
  if (const json* gs = r.child("groups")) {
    if (!gs->is_array()) throw ValidationError("groups must be an array");
    c.groups.clear();
    std::size_t i = 0;
    for (const auto& gj : *gs) {
      GroupConfig gc;
      Reader gr(gj, "groups[" + std::to_string(i++) + "]");
      gr.get("members", gc.members);
      get_enum(gr, "policy", gc.policy, parse_excess_policy);
      gr.finish();
      c.groups.push_back(std::move(gc));
    }
  }
  r.finish();
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg = default_config();
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char ch) { return std::isspace(ch) != 0; });
  if (!blank) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      // The reported byte is the one after the offending token.
      const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
      throw ParseError(std::string("config parse error: ") + e.what(), line, col);
    }
    read_config(j, cfg);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_json(const ScenarioConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["n_onus"] = c.n_onus;
  j["n_wavelengths"] = c.n_wavelengths;
  j["line_rate_gbps"] = static_cast<double>(c.line_rate_bps) / 1e9;
  j["guard_us"] = unscaled(c.guard, 1e3);
  j["max_cycle_ms"] = unscaled(c.max_cycle, 1e6);
  j["rtt_min_us"] = unscaled(c.rtt_min, 1e3);
  j["rtt_max_us"] = unscaled(c.rtt_max, 1e3);
  j["duration_s"] = unscaled(c.duration, 1e9);
  j["warmup_s"] = unscaled(c.warmup, 1e9);
  j["replications"] = c.replications;
  j["master_seed"] = c.master_seed;
  std::vector<double> g;
  for (double v : c.guaranteed_bps) g.push_back(v / 1e9);
  j["guaranteed_gbps"] = g;
  j["loads"] = c.loads;
  j["buffer_bytes"] = c.buffer_bytes;
  j["reservoir"] = c.reservoir;
  j["scheduler"] = {
      {"kind", to_string(c.scheduler.kind)},
      {"priority", to_string(c.scheduler.priority)},
      {"theta", c.scheduler.theta},
      {"wavelength_policy", to_string(c.scheduler.wavelength.kind)},
      {"msd_map", c.scheduler.wavelength.msd_map},
  };
  const auto& t = c.traffic;
  j["traffic"] = {
      {"overhead_bytes", t.cbr.overhead_bytes},
      {"dc",
       {{"enabled", t.dc},
        {"packet_bytes", t.cbr.packet_bytes},
        {"interarrival_us", unscaled(t.cbr.interarrival, 1e3)}}},
      {"ds", {{"enabled", t.ds}}},
      {"be", {{"enabled", t.be}}},
      {"pareto",
       {{"hurst", t.pareto.hurst},
        {"mean_on_ms", static_cast<double>(t.pareto.mean_on.count()) / 1e6},
        {"duty", t.pareto.duty},
        {"burst_shape", t.pareto.burst_shape},
        {"burst_min_bytes", t.pareto.burst_min},
        {"burst_max_bytes", t.pareto.burst_max}}},
      {"fl",
       {{"enabled", t.fl},
        {"payload_bytes", t.fl_spec.payload_bytes_per_round},
        {"clients", t.fl_spec.clients},
        {"compute_min_s", unscaled(t.fl_spec.compute_min, 1e9)},
        {"compute_max_s", unscaled(t.fl_spec.compute_max, 1e9)},
        {"downstream_ms", unscaled(t.fl_spec.downstream_delay, 1e6)},
        {"aggregation_ms", unscaled(t.fl_spec.aggregation_delay, 1e6)},
        {"sync_window_s", unscaled(t.fl_spec.sync_window, 1e9)}}},
  };
  json groups = json::array();
  for (const auto& gr : c.groups) {
    groups.push_back({{"members", gr.members}, {"policy", to_string(gr.policy)}});
  }
  j["groups"] = groups;
  return j.dump(2);
}

std::uint64_t config_hash(const ScenarioConfig& cfg) { return fnv1a64(to_json(cfg)); }

std::string policy_label(const ScenarioConfig& cfg) {
  if (!cfg.groups.empty()) return std::string(to_string(cfg.groups.front().policy));
  if (cfg.scheduler.kind == SchedulerKind::DwbaFl) {
    return std::string(to_string(cfg.scheduler.priority));
  }
  return "none";
}

}  // namespace ponsim
