#include "ponsim/flsync.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "ponsim/errors.hpp"

namespace ponsim {

std::size_t RoundRecord::involved_count(SimTime s) const {
  return static_cast<std::size_t>(std::count_if(clients.begin(), clients.end(), [&](const auto& c) {
    return c.upload_complete && *c.upload_complete - start <= s;
  }));
}

double RoundRecord::involved_fraction(SimTime s) const {
  if (clients.empty()) return 1.0;
  return static_cast<double>(involved_count(s)) / static_cast<double>(clients.size());
}

FlCoordinator::FlCoordinator(FlWorkloadSpec spec, std::vector<std::uint32_t> clients)
    : spec_(spec), clients_(std::move(clients)) {
  spec_.validate();
}

RoundRecord& FlCoordinator::record(std::uint32_t round) {
  auto it = std::find_if(records_.rbegin(), records_.rend(),
                         [&](const RoundRecord& r) { return r.round == round; });
  if (it == records_.rend()) throw std::out_of_range("unknown FL round " + std::to_string(round));
  return *it;
}

const RoundRecord& FlCoordinator::start_round(std::uint32_t round, SimTime now,
                                              const RngFor& rng) {
  RoundRecord rec;
  rec.round = round;
  rec.start = now;
  rec.sync_window = spec_.sync_window;
  const double lo = to_seconds(spec_.compute_min);
  const double hi = to_seconds(spec_.compute_max);
  for (auto c : clients_) {
    FlClientState st;
    st.client = c;
    st.round = round;
    st.compute_time = from_seconds(rng(c).uniform(lo, hi));
    st.upload_release = now + spec_.downstream_delay + st.compute_time;
    rec.clients.push_back(st);
  }
  records_.push_back(std::move(rec));
  return records_.back();
}

void FlCoordinator::mark_complete(std::uint32_t client, std::uint32_t round, SimTime t) {
  for (auto& c : record(round).clients) {
    if (c.client == client) {
      c.upload_complete = t;
      return;
    }
  }
}

const RoundRecord& FlCoordinator::close_round(std::uint32_t round, SimTime s) {
  auto& rec = record(round);
  rec.sync_window = s;
  rec.involved.clear();
  rec.stragglers.clear();
  for (const auto& c : rec.clients) {
    const bool in = c.upload_complete && *c.upload_complete - rec.start <= s;
    (in ? rec.involved : rec.stragglers).push_back(c.client);
  }
  rec.closed = true;
  return rec;
}

SimTime FlCoordinator::next_round_start(std::uint32_t round) const {
  for (const auto& r : records_) {
    if (r.round == round) return r.start + r.sync_window + spec_.aggregation_delay;
  }
  throw std::out_of_range("unknown FL round " + std::to_string(round));
}

std::vector<std::pair<SimTime, double>> involved_fraction_curve(
    std::span<const RoundRecord> records, std::span<const SimTime> s_grid) {
  std::vector<std::pair<SimTime, double>> out;
  for (SimTime s : s_grid) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
      if (r.clients.empty()) continue;
      sum += r.involved_fraction(s);
      ++n;
    }
    out.emplace_back(s, n ? sum / static_cast<double>(n) : 1.0);
  }
  return out;
}

std::optional<SimTime> sync_time_for(std::span<const RoundRecord> records,
                                     std::span<const SimTime> s_grid, double target) {
  for (const auto& [s, f] : involved_fraction_curve(records, s_grid)) {
    if (f >= target) return s;
  }
  return std::nullopt;
}

AccuracyTable AccuracyTable::parse(std::istream& is) {
  AccuracyTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    double f = 0.0;
    double a = 0.0;
    if (!(ls >> f)) continue;
    if (!(ls >> a)) {
      throw ConfigError("accuracy table line " + std::to_string(lineno) + ": expected two columns");
    }
    if (f < 0.0 || f > 1.0 || a < 0.0 || a > 1.0) {
      throw ConfigError("accuracy table line " + std::to_string(lineno) + ": values outside [0, 1]");
    }
    if (!t.rows.empty() && (f < t.rows.back().first || a < t.rows.back().second)) {
      throw ConfigError("accuracy table line " + std::to_string(lineno) + ": not monotone");
    }
    t.rows.emplace_back(f, a);
  }
  return t;
}

AccuracyTable AccuracyTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open accuracy table " + path);
  return parse(in);
}

double accuracy_at(const AccuracyTable& table, double fraction) {
  const auto& r = table.rows;
  if (r.empty()) throw EmptyTable("accuracy table has no rows");
  if (fraction <= r.front().first) return r.front().second;
  if (fraction >= r.back().first) return r.back().second;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (fraction <= r[i].first) {
      const auto [x0, y0] = r[i - 1];
      const auto [x1, y1] = r[i];
      if (x1 == x0) return y1;
      return y0 + (y1 - y0) * (fraction - x0) / (x1 - x0);
    }
  }
  return r.back().second;
}

}  // namespace ponsim
