#include "ponsim/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ponsim/errors.hpp"

namespace ponsim {

double PercentileSet::at(int p) const {
  for (std::size_t i = 0; i < kPercentiles.size(); ++i) {
    if (kPercentiles[i] == p) return values[i];
  }
  throw std::out_of_range("percentile " + std::to_string(p) + " is not tracked");
}

PercentileSet percentile_set(std::span<const double> samples) {
  if (samples.empty()) throw EmptySamples("percentile of an empty sample set");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  PercentileSet out;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < kPercentiles.size(); ++i) {
    const std::size_t rank = (static_cast<std::size_t>(kPercentiles[i]) * n + 99) / 100;
    out.values[i] = v[std::max<std::size_t>(rank, 1) - 1];
  }
  return out;
}

DelayCollector::DelayCollector(SimTime warmup, std::size_t reservoir_capacity, RngStream rng)
    : warmup_(warmup), capacity_(reservoir_capacity), rng_(std::move(rng)) {
  if (capacity_ != 0) samples_.reserve(capacity_);
}

// Reservoir sampling with geometric skips (Li's algorithm L).
void DelayCollector::schedule_skip() {
  const double u = 1.0 - rng_.uniform01();
  next_take_ += static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-w_))) + 1;
}

void DelayCollector::record(SimTime at, SimTime delay) {
  if (at < warmup_) return;
  const auto ns = static_cast<std::uint64_t>(delay.count());
  sum_ns_ += ns;
  const std::uint64_t index = count_++;
  const double x = static_cast<double>(ns) / 1e9;
  if (capacity_ == 0 || samples_.size() < capacity_) {
    samples_.push_back(x);
    if (capacity_ != 0 && samples_.size() == capacity_) {
      w_ = std::exp(std::log(1.0 - rng_.uniform01()) / static_cast<double>(capacity_));
      next_take_ = index;
      schedule_skip();
    }
    return;
  }
  if (index == next_take_) {
    samples_[rng_.uniform_int(0, capacity_ - 1)] = x;
    w_ *= std::exp(std::log(1.0 - rng_.uniform01()) / static_cast<double>(capacity_));
    schedule_skip();
  }
}

double DelayCollector::mean_seconds() const {
  if (count_ == 0) return 0.0;
  return static_cast<double>(sum_ns_) / static_cast<double>(count_) / 1e9;
}

std::optional<DelayStats> summarize(TrafficClass cls, const DelayCollector& c) {
  if (c.count() == 0) return std::nullopt;
  DelayStats s;
  s.cls = cls;
  s.count = c.count();
  s.mean_s = c.mean_seconds();
  s.percentiles = percentile_set(c.samples());
  s.warmup_excluded = c.warmup();
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<MetricRow> to_rows(const RunResult& r) {
  std::vector<MetricRow> rows;
  for (auto c : kAllClasses) {
    const std::string cls{to_string(c)};
    const auto& d = r.delay[index_of(c)];
    if (d) {
      rows.push_back({cls, "mean_delay_s", d->mean_s});
      for (std::size_t i = 0; i < kPercentiles.size(); ++i) {
        rows.push_back({cls, "p" + std::to_string(kPercentiles[i]), d->percentiles.values[i]});
      }
    }
    rows.push_back({cls, "drop_count", static_cast<double>(r.drops[index_of(c)])});
  }
  for (std::size_t k = 0; k < r.utilization.size(); ++k) {
    rows.push_back({"all", "util_λ" + std::to_string(k), r.utilization[k]});
  }
  rows.push_back({"all", "mean_cycle_s", r.mean_cycle_s});
  if (r.fl_rounds > 0) {
    if (!r.fl_round_delays_s.empty()) {
      const double sum =
          std::accumulate(r.fl_round_delays_s.begin(), r.fl_round_delays_s.end(), 0.0);
      rows.push_back({"FL", "fl_round_delay_s", sum / r.fl_round_delays_s.size()});
    }
    rows.push_back({"FL", "involved_fraction", r.involved_fraction});
  }
  return rows;
}

void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& os, const RunResult& r) {
  const std::string prefix = r.labels.scenario + ',' + std::to_string(r.seed) + ',' +
                             format_double(r.load) + ',' + r.labels.scheduler + ',' +
                             r.labels.policy + ',' + r.labels.wavelength_policy + ',';
  for (const auto& row : to_rows(r)) {
    os << prefix << row.cls << ',' << row.metric << ',' << format_double(row.value) << '\n';
  }
}

MetricSummary aggregate_replications(std::span<const double> values) {
  if (values.size() < 2) {
    throw InsufficientReplications("confidence intervals need at least two replications");
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, t * sd / std::sqrt(n), values.size()};
}

std::vector<SummaryRow> summarize_replications(std::span<const RunResult> runs) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<double>> by_key;
  for (const auto& r : runs) {
    for (const auto& row : to_rows(r)) {
      auto key = std::make_pair(row.cls, row.metric);
      auto [it, fresh] = by_key.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.push_back(row.value);
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const auto& v = by_key[key];
    if (v.size() < 2) continue;
    out.push_back({key.first, key.second, aggregate_replications(v)});
  }
  return out;
}

void write_summary_rows(std::ostream& os, const RunLabels& labels, double load,
                        std::span<const SummaryRow> rows) {
  for (const auto& r : rows) {
    os << labels.scenario << ',' << format_double(load) << ',' << labels.scheduler << ','
       << labels.policy << ',' << labels.wavelength_policy << ',' << r.cls << ',' << r.metric
       << ',' << format_double(r.summary.mean) << ',' << format_double(r.summary.half_width)
       << ',' << r.summary.n << '\n';
  }
}

}  // namespace ponsim
