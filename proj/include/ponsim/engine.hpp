#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "ponsim/rng.hpp"
#include "ponsim/time.hpp"

namespace ponsim {

enum class EventKind : std::uint8_t {
  FrameArrival,
  ReportAtOlt,
  GateAtOnu,
  TxStart,
  TxEnd,
  FlRoundStart,
  FlAggregate,
  StatsFlush,
};

/// Pending-set entry. `target` is usually an ONU index; `arg` is a free
/// payload word (e.g. an FL round id).
struct Event {
  SimTime fire_at{};
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::StatsFlush;
  std::uint32_t target = 0;
  std::uint64_t arg = 0;
};

/// Single-threaded discrete-event engine. Events fire in (fire_at, sequence)
/// order; sequence is the insertion counter, which breaks time ties.
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;

  explicit Engine(std::uint64_t master_seed) : master_seed_(master_seed) {}

  void set_handler(Handler handler) { handler_ = std::move(handler); }

  /// Throws PastEventError if `at` precedes now().
  std::uint64_t schedule(SimTime at, EventKind kind, std::uint32_t target = 0,
                         std::uint64_t arg = 0);

  /// Processes every event with fire_at <= t_end, then parks the clock at
  /// t_end. Returns the number of events processed by this call.
  std::uint64_t run_until(SimTime t_end);

  SimTime now() const { return now_; }
  std::uint64_t master_seed() const { return master_seed_; }

  /// Named stream, created on first use. References stay valid for the
  /// engine's lifetime.
  RngStream& rng(std::string_view name);

  std::uint64_t scheduled_count() const { return scheduled_; }
  std::uint64_t processed_count() const { return processed_; }
  std::uint64_t pending_count() const { return queue_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::uint64_t master_seed_;
  SimTime now_{0};
  std::uint64_t scheduled_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::map<std::string, RngStream, std::less<>> streams_;
  Handler handler_;
};

}  // namespace ponsim
