#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>

#include "ponsim/config.hpp"
#include "ponsim/flsync.hpp"
#include "ponsim/metrics.hpp"
#include "ponsim/sched.hpp"

namespace ponsim {

/// Offered payload rates of one ONU at a load point.
struct OfferedRates {
  double dc_bps = 0.0;
  double fl_bps = 0.0;
  double ds_bps = 0.0;
  double be_bps = 0.0;

  double total() const { return dc_bps + fl_bps + ds_bps + be_bps; }
};

/// load * b_i, less the CBR and nominal FL rates, split evenly between the
/// two ON/OFF classes (never below zero).
OfferedRates offered_rates(const ScenarioConfig& cfg, std::uint32_t onu, double load);

struct SimulationOptions {
  /// Per-grant log lines.
  std::ostream* gate_log = nullptr;
  /// Per-frame lines: onu,class,arrival_ns,departure_ns,wavelength.
  std::ostream* frame_trace = nullptr;
  /// Called for every frame as its window is packed.
  std::function<void(const Frame&, SimTime departure, std::uint32_t wavelength)> on_departure;
  /// Called for every gate the OLT releases.
  std::function<void(const GateMsg&)> on_gate;
  /// Called for every report as it reaches the OLT.
  std::function<void(const ReportMsg&)> on_report;
};

/// One replication of one load point.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, double load, std::uint64_t seed,
             SimulationOptions opts = {});
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  RunResult run();

  const Olt& olt() const;
  const FlCoordinator* fl() const;
  SimTime rtt(std::uint32_t onu) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run_scenario(const ScenarioConfig& cfg, double load, std::uint64_t seed,
                       SimulationOptions opts = {});

}  // namespace ponsim
