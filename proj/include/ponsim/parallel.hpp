#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ponsim/config.hpp"
#include "ponsim/metrics.hpp"
#include "ponsim/traffic.hpp"

namespace ponsim {

/// Seed of replication r: master + r.
inline std::uint64_t replication_seed(std::uint64_t master, std::uint32_t r) { return master + r; }

/// Replications of one load point, one engine each, in seed order.
std::vector<RunResult> run_replications_serial(const ScenarioConfig& cfg, double load,
                                               std::uint32_t replications, std::uint64_t master);

/// Same results as the serial form, byte for byte; replications run on up
/// to `workers` OpenMP threads (0: runtime default).
std::vector<RunResult> run_replications_parallel(const ScenarioConfig& cfg, double load,
                                                 std::uint32_t replications,
                                                 std::uint64_t master, int workers = 0);

/// Bytes arriving in consecutive bins of width `bin` over [0, horizon).
std::vector<double> bin_arrivals(std::span<const Frame> frames, SimTime bin, SimTime horizon);

struct VarianceTimePoint {
  std::uint64_t m = 0;
  double variance = 0.0;
};

/// Variance of the m-aggregated series for m = 1, 2, 4, ... while at least
/// `min_blocks` blocks remain.
std::vector<VarianceTimePoint> variance_time_serial(std::span<const double> series,
                                                    std::size_t min_blocks = 16);
std::vector<VarianceTimePoint> variance_time_parallel(std::span<const double> series,
                                                      std::size_t min_blocks = 16);

/// H = 1 + slope / 2 from a least-squares fit of log variance on log m.
double hurst_from_points(std::span<const VarianceTimePoint> points);

double variance_time_hurst_serial(std::span<const double> series, std::size_t min_blocks = 16);
double variance_time_hurst_parallel(std::span<const double> series, std::size_t min_blocks = 16);

}  // namespace ponsim
