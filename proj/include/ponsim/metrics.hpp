#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ponsim/rng.hpp"
#include "ponsim/time.hpp"
#include "ponsim/traffic.hpp"

namespace ponsim {

inline constexpr std::array<int, 5> kPercentiles{10, 30, 50, 80, 100};

struct PercentileSet {
  std::array<double, kPercentiles.size()> values{};

  /// Value for one of kPercentiles; throws std::out_of_range otherwise.
  double at(int p) const;
};

/// Nearest-rank: the ceil(p/100 * n)-th smallest sample. Throws EmptySamples.
PercentileSet percentile_set(std::span<const double> samples);

/// Frame delays of one class. The mean is exact over every recorded frame;
/// percentiles come from a uniform reservoir (or every sample when the
/// capacity is 0). Samples stamped before the warmup are ignored.
class DelayCollector {
 public:
  DelayCollector(SimTime warmup, std::size_t reservoir_capacity, RngStream rng);

  void record(SimTime at, SimTime delay);

  std::uint64_t count() const { return count_; }
  double mean_seconds() const;
  const std::vector<double>& samples() const { return samples_; }
  SimTime warmup() const { return warmup_; }

 private:
  void schedule_skip();

  SimTime warmup_;
  std::size_t capacity_;
  RngStream rng_;
  std::uint64_t count_ = 0;
  unsigned __int128 sum_ns_ = 0;
  std::vector<double> samples_;
  double w_ = 0.0;
  std::uint64_t next_take_ = 0;
};

struct DelayStats {
  TrafficClass cls = TrafficClass::BE;
  std::uint64_t count = 0;
  double mean_s = 0.0;
  PercentileSet percentiles;
  SimTime warmup_excluded{};
};

/// Empty optional when no samples were recorded.
std::optional<DelayStats> summarize(TrafficClass cls, const DelayCollector& c);

struct InvariantReport {
  std::uint64_t guard = 0;
  std::uint64_t causality = 0;
  std::uint64_t conservation = 0;
  std::uint64_t window = 0;
  std::uint64_t cycle_bound = 0;
  std::uint64_t slice_exclusivity = 0;
  std::uint64_t slice_conservation = 0;
  long long first_at_ns = -1;
  std::string first;

  std::uint64_t total() const {
    return guard + causality + conservation + window + cycle_bound + slice_exclusivity +
           slice_conservation;
  }
};

struct RunLabels {
  std::string scenario = "default";
  std::string scheduler;
  std::string policy;
  std::string wavelength_policy;
};

struct RunResult {
  RunLabels labels;
  std::uint64_t seed = 0;
  double load = 0.0;
  std::array<std::optional<DelayStats>, kNumClasses> delay;
  std::array<std::uint64_t, kNumClasses> drops{};
  double mean_cycle_s = 0.0;
  double max_cycle_s = 0.0;
  std::vector<double> utilization;
  std::vector<double> fl_round_delays_s;
  double involved_fraction = 0.0;
  std::uint64_t fl_rounds = 0;
  InvariantReport invariants;
  std::uint64_t events = 0;
  std::uint64_t frames_enqueued = 0;
  std::uint64_t frames_sent = 0;
};

struct MetricRow {
  std::string cls;
  std::string metric;
  double value = 0.0;
};

/// Rows of the results CSV for one run, in a fixed order.
std::vector<MetricRow> to_rows(const RunResult& r);

inline constexpr const char* kCsvHeader =
    "scenario,seed,load,scheduler,policy,wavelength_policy,class,metric,value";

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_csv_header(std::ostream& os);
void write_csv_rows(std::ostream& os, const RunResult& r);

struct MetricSummary {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

/// Mean and Student-t 95% half-width. Throws InsufficientReplications for
/// fewer than two values.
MetricSummary aggregate_replications(std::span<const double> values);

struct SummaryRow {
  std::string cls;
  std::string metric;
  MetricSummary summary;
};

/// Groups rows of replications of one scenario point by (class, metric).
/// Metrics present in fewer than two replications are skipped.
std::vector<SummaryRow> summarize_replications(std::span<const RunResult> runs);

inline constexpr const char* kSummaryHeader =
    "scenario,load,scheduler,policy,wavelength_policy,class,metric,mean,ci95_half_width,n";

void write_summary_rows(std::ostream& os, const RunLabels& labels, double load,
                        std::span<const SummaryRow> rows);

}  // namespace ponsim
