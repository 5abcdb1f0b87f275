#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <span>
#include <string_view>
#include <vector>

#include "ponsim/rng.hpp"
#include "ponsim/time.hpp"

namespace ponsim {

enum class TrafficClass : std::uint8_t { FL = 0, DC = 1, DS = 2, BE = 3 };

inline constexpr std::array<TrafficClass, 4> kAllClasses{TrafficClass::FL, TrafficClass::DC,
                                                         TrafficClass::DS, TrafficClass::BE};
inline constexpr std::size_t kNumClasses = kAllClasses.size();

constexpr std::size_t index_of(TrafficClass c) { return static_cast<std::size_t>(c); }
std::string_view to_string(TrafficClass c);
std::optional<TrafficClass> parse_traffic_class(std::string_view s);

inline constexpr std::uint16_t kMinPayload = 64;
inline constexpr std::uint16_t kMaxPayload = 1518;
inline constexpr std::uint16_t kMtu = 1500;
inline constexpr std::uint16_t kDefaultOverhead = 20;
/// Largest frame on the wire with the default overhead.
inline constexpr std::uint32_t kMaxWireFrame = kMaxPayload + kDefaultOverhead;

struct Frame {
  std::uint64_t id = 0;
  std::uint32_t onu = 0;
  TrafficClass cls = TrafficClass::BE;
  std::uint16_t payload_bytes = kMinPayload;
  std::uint16_t overhead_bytes = kDefaultOverhead;
  SimTime arrival{};
  std::optional<std::uint32_t> fl_round;

  std::uint32_t wire_bytes() const { return std::uint32_t{payload_bytes} + overhead_bytes; }
};

/// Checks payload bounds and the fl_round <-> FL tag pairing.
bool frame_is_valid(const Frame& f);

// --- constant bit rate (delay-critical) -----------------------------------

struct CbrSpec {
  std::uint16_t packet_bytes = 70;
  SimTime interarrival = 12'500ns;
  std::uint16_t overhead_bytes = kDefaultOverhead;

  /// Offered payload rate in bit/s.
  double rate_bps() const;
  void validate() const;
};

/// Emits frames at k * interarrival, k >= 1.
class CbrSource {
 public:
  CbrSource(CbrSpec spec, std::uint32_t onu, TrafficClass cls = TrafficClass::DC);

  SimTime peek() const { return next_; }
  Frame pop();

 private:
  CbrSpec spec_;
  std::uint32_t onu_;
  TrafficClass cls_;
  SimTime next_;
};

std::vector<Frame> cbr_arrivals(const CbrSpec& spec, SimTime horizon, std::uint32_t onu = 0);

// --- Pareto ON/OFF (delay-sensitive, best-effort) -------------------------

/// Self-similar source: a superposition of independent ON/OFF sub-sources.
/// An ON period spends a bounded Pareto byte budget on frames with uniform
/// payload in [64, 1518], spaced at the sub-source ON rate; OFF periods are
/// bounded Pareto with the same shape and the same support ratio. The ON
/// rate follows from the mean budget and `mean_on`; the sub-source count and
/// mean OFF time follow from `target_rate_bps` and `duty`.
struct ParetoOnOffSpec {
  double hurst = 0.8;
  /// Long-run payload rate.
  double target_rate_bps = 0.0;
  SimTime mean_on = 20ms;
  /// Target fraction of time a sub-source is ON.
  double duty = 0.75;
  /// Bounded Pareto burst shape; 0 means "same as the ON/OFF shape".
  double burst_shape = 0.0;
  double burst_min = 1'500.0;
  double burst_max = 50'000'000.0;
  std::uint16_t overhead_bytes = kDefaultOverhead;

  /// 3 - 2H, the shape giving Hurst parameter H for ON/OFF superpositions.
  double shape_on() const { return 3.0 - 2.0 * hurst; }
  double effective_burst_shape() const { return burst_shape > 0.0 ? burst_shape : shape_on(); }
  /// Mean payload of one ON period: the budget mean plus the mean overshoot
  /// of the last frame.
  double mean_burst_bytes() const;
  double on_rate_bps() const;
  std::uint32_t substreams() const;
  /// Duty after rounding the sub-source count up.
  double effective_duty() const;
  SimTime mean_off() const;
  void validate() const;
};

class ParetoOnOffSource {
 public:
  ParetoOnOffSource(const ParetoOnOffSpec& spec, RngStream& rng, std::uint32_t onu,
                    TrafficClass cls);

  SimTime peek() const { return heap_.empty() ? kNever : heap_.top().first; }
  Frame pop();

 private:
  struct Sub {
    double cursor_ns = 0.0;
    double budget = 0.0;
    std::uint16_t payload = 0;
    SimTime next{};
  };
  using Entry = std::pair<SimTime, std::uint32_t>;

  void start_burst(Sub& s);
  void prepare_frame(Sub& s);

  ParetoOnOffSpec spec_;
  RngStream* rng_;
  std::uint32_t onu_;
  TrafficClass cls_;
  BoundedPareto burst_;
  BoundedPareto off_;
  double off_scale_ = 0.0;
  double ns_per_byte_ = 0.0;
  std::uint64_t emitted_ = 0;
  std::vector<Sub> subs_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
};

std::vector<Frame> pareto_onoff_arrivals(const ParetoOnOffSpec& spec, RngStream& rng,
                                         SimTime horizon, std::uint32_t onu = 0,
                                         TrafficClass cls = TrafficClass::BE);

// --- federated learning uploads -------------------------------------------

struct FlWorkloadSpec {
  std::uint64_t payload_bytes_per_round = 26'400'000;
  std::uint32_t clients = 0;  // 0: one client per ONU
  SimTime compute_min = 1s;
  SimTime compute_max = 2'500ms;
  SimTime downstream_delay = 10ms;
  SimTime aggregation_delay = 10ms;
  /// Synchronization window S used to close each round.
  SimTime sync_window = 2'500ms;
  std::uint16_t overhead_bytes = kDefaultOverhead;

  /// Nominal per-client upload rate: one payload per round period.
  double nominal_rate_bps() const;
  void validate() const;
};

/// The upload of one client for one round, cut into MTU frames that all
/// arrive at `release`. A short last frame is padded to the 64-byte minimum.
std::vector<Frame> fl_round_frames(const FlWorkloadSpec& spec, std::uint32_t client,
                                   std::uint32_t round, SimTime release);

/// One line per frame: "time_ns onu class bytes".
void write_frame_trace(std::ostream& os, std::span<const Frame> frames);

}  // namespace ponsim
