#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ponsim/rng.hpp"
#include "ponsim/time.hpp"
#include "ponsim/traffic.hpp"

namespace ponsim {

struct FlClientState {
  std::uint32_t client = 0;
  std::uint32_t round = 0;
  SimTime compute_time{};
  SimTime upload_release{};
  std::optional<SimTime> upload_complete;
};

struct RoundRecord {
  std::uint32_t round = 0;
  SimTime start{};
  SimTime sync_window{};
  std::vector<FlClientState> clients;
  std::vector<std::uint32_t> involved;
  std::vector<std::uint32_t> stragglers;
  bool closed = false;

  /// Clients whose upload finished within `s` of the round start.
  std::size_t involved_count(SimTime s) const;
  /// involved_count(s) / clients; 1 for a round without clients.
  double involved_fraction(SimTime s) const;
};

/// Synchronous rounds: every client of round r downloads the global model,
/// trains, then uploads; the server keeps what arrives within S.
class FlCoordinator {
 public:
  using RngFor = std::function<RngStream&(std::uint32_t client)>;

  FlCoordinator(FlWorkloadSpec spec, std::vector<std::uint32_t> clients);

  /// Draws compute times and fixes the release of every upload:
  /// now + downstream_delay + compute.
  const RoundRecord& start_round(std::uint32_t round, SimTime now, const RngFor& rng);

  /// Upload of `client` for `round` fully left the PON at `t`.
  void mark_complete(std::uint32_t client, std::uint32_t round, SimTime t);

  /// Splits the round's clients into involved and stragglers against `s`.
  const RoundRecord& close_round(std::uint32_t round, SimTime s);

  /// Start of the round after `round`: start + S + aggregation delay.
  SimTime next_round_start(std::uint32_t round) const;

  const std::vector<RoundRecord>& records() const { return records_; }
  const FlWorkloadSpec& spec() const { return spec_; }
  const std::vector<std::uint32_t>& clients() const { return clients_; }

 private:
  RoundRecord& record(std::uint32_t round);

  FlWorkloadSpec spec_;
  std::vector<std::uint32_t> clients_;
  std::vector<RoundRecord> records_;
};

/// Mean involved fraction per S over all rounds with clients.
std::vector<std::pair<SimTime, double>> involved_fraction_curve(
    std::span<const RoundRecord> records, std::span<const SimTime> s_grid);

/// Smallest S on `s_grid` whose mean involved fraction reaches `target`.
std::optional<SimTime> sync_time_for(std::span<const RoundRecord> records,
                                     std::span<const SimTime> s_grid, double target);

struct AccuracyTable {
  std::vector<std::pair<double, double>> rows;

  /// Two columns (fraction, accuracy); '#' starts a comment. Rows must be
  /// non-decreasing in both columns. Throws ConfigError.
  static AccuracyTable parse(std::istream& is);
  static AccuracyTable load(const std::string& path);
};

/// Linear interpolation, clamped to the first and last rows. Throws EmptyTable.
double accuracy_at(const AccuracyTable& table, double fraction);

}  // namespace ponsim
