#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ponsim/dba.hpp"
#include "ponsim/sched.hpp"
#include "ponsim/time.hpp"
#include "ponsim/traffic.hpp"

namespace ponsim {

struct GroupConfig {
  std::vector<std::uint32_t> members;
  ExcessPolicy policy = ExcessPolicy::DBA2;
};

struct TrafficConfig {
  bool dc = true;
  bool ds = true;
  bool be = true;
  bool fl = true;
  CbrSpec cbr;
  /// Template for the DS and BE sources; target rates are set per load.
  ParetoOnOffSpec pareto;
  FlWorkloadSpec fl_spec;
};

struct ScenarioConfig {
  std::string scenario = "default";
  std::uint32_t n_onus = 32;
  std::uint32_t n_wavelengths = 2;
  std::uint64_t line_rate_bps = 25'000'000'000ull;
  SimTime guard = 624ns;
  SimTime max_cycle = 1ms;
  SimTime rtt_min = 100us;
  SimTime rtt_max = 200us;
  SimTime duration = 100s;
  SimTime warmup = 5s;
  std::uint32_t replications = 10;
  std::uint64_t master_seed = 1;
  SchedulerConfig scheduler;
  /// Per-ONU guaranteed rates; empty means an equal share of the capacity.
  std::vector<double> guaranteed_bps;
  std::vector<double> loads{0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0};
  TrafficConfig traffic;
  std::vector<GroupConfig> groups;
  /// Finite ONU buffer in bytes; 0 means unbounded.
  std::uint64_t buffer_bytes = 0;
  /// Reservoir size for delay percentiles; 0 keeps every sample.
  std::size_t reservoir = 100'000;

  double capacity_bps() const {
    return static_cast<double>(line_rate_bps) * static_cast<double>(n_wavelengths);
  }
  double guaranteed(std::uint32_t onu) const;
  std::uint64_t wmax_bytes(std::uint32_t onu) const;
  std::vector<std::uint32_t> fl_clients() const;

  /// Throws ValidationError naming the violated rule.
  void validate() const;
};

/// Built-in defaults.
ScenarioConfig default_config();

/// Reads a JSON config; keys absent from the file keep their defaults and
/// unknown keys are rejected. An empty file yields the defaults.
/// Throws ParseError (with line and column) or ValidationError.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::string& path);

/// Canonical JSON form: every field, fixed key order, fixed units.
std::string to_json(const ScenarioConfig& cfg);

/// FNV-1a of the canonical JSON.
std::uint64_t config_hash(const ScenarioConfig& cfg);

/// "none", the DWBA-FL priority policy, or the SLA group excess policy.
std::string policy_label(const ScenarioConfig& cfg);

}  // namespace ponsim
