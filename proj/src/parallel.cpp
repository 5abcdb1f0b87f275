#include "ponsim/parallel.hpp"

#include <cmath>
#include <exception>
#include <omp.h>

#include "ponsim/simulation.hpp"

namespace ponsim {

std::vector<RunResult> run_replications_serial(const ScenarioConfig& cfg, double load,
                                               std::uint32_t replications, std::uint64_t master) {
  std::vector<RunResult> out;
  out.reserve(replications);
  for (std::uint32_t r = 0; r < replications; ++r) {
    out.push_back(run_scenario(cfg, load, replication_seed(master, r)));
  }
  return out;
}

std::vector<RunResult> run_replications_parallel(const ScenarioConfig& cfg, double load,
                                                 std::uint32_t replications,
                                                 std::uint64_t master, int workers) {
  std::vector<RunResult> out(replications);
  std::vector<std::exception_ptr> errors(replications);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(replications); ++r) {
    try {
      out[r] = run_scenario(cfg, load, replication_seed(master, static_cast<std::uint32_t>(r)));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> bin_arrivals(std::span<const Frame> frames, SimTime bin, SimTime horizon) {
  const auto n = static_cast<std::size_t>(horizon.count() / bin.count());
  std::vector<double> out(n, 0.0);
  for (const auto& f : frames) {
    const auto k = static_cast<std::size_t>(f.arrival.count() / bin.count());
    if (k < n) out[k] += f.wire_bytes();
  }
  return out;
}

namespace {

double aggregated_variance(std::span<const double> series, std::uint64_t m) {
  const std::size_t blocks = series.size() / m;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += series[b * m + i];
    const double mean = s / static_cast<double>(m);
    sum += mean;
    sum2 += mean * mean;
  }
  const double nb = static_cast<double>(blocks);
  const double mu = sum / nb;
  return (sum2 - nb * mu * mu) / (nb - 1.0);
}

std::vector<std::uint64_t> levels(std::size_t n, std::size_t min_blocks) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 1; n / m >= std::max<std::size_t>(min_blocks, 2); m *= 2) out.push_back(m);
  return out;
}

}  // namespace

std::vector<VarianceTimePoint> variance_time_serial(std::span<const double> series,
                                                    std::size_t min_blocks) {
  std::vector<VarianceTimePoint> out;
  for (auto m : levels(series.size(), min_blocks)) {
    out.push_back({m, aggregated_variance(series, m)});
  }
  return out;
}

std::vector<VarianceTimePoint> variance_time_parallel(std::span<const double> series,
                                                      std::size_t min_blocks) {
  const auto ms = levels(series.size(), min_blocks);
  std::vector<VarianceTimePoint> out(ms.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(ms.size()); ++i) {
    out[i] = {ms[i], aggregated_variance(series, ms[i])};
  }
  return out;
}

double hurst_from_points(std::span<const VarianceTimePoint> points) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double n = 0.0;
  for (const auto& p : points) {
    if (!(p.variance > 0.0)) continue;
    const double x = std::log(static_cast<double>(p.m));
    const double y = std::log(p.variance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1.0;
  }
  if (n < 2.0) return std::nan("");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return 1.0 + slope / 2.0;
}

double variance_time_hurst_serial(std::span<const double> series, std::size_t min_blocks) {
  return hurst_from_points(variance_time_serial(series, min_blocks));
}

double variance_time_hurst_parallel(std::span<const double> series, std::size_t min_blocks) {
  return hurst_from_points(variance_time_parallel(series, min_blocks));
}

}  // namespace ponsim
