#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ponsim/time.hpp"
#include "ponsim/traffic.hpp"

namespace ponsim {

inline constexpr std::uint32_t kReportBytes = 64;

struct SlaProfile {
  double guaranteed_bps = 0.0;
  std::uint64_t wmax_bytes = 0;
  std::optional<std::uint32_t> group;

  /// Bytes per cycle matching `bps`: floor(bps * cycle / 8).
  static std::uint64_t wmax_for(double bps, SimTime max_cycle);
};

using ClassOrder = std::array<TrafficClass, kNumClasses>;

inline constexpr ClassOrder kIpactOrder{TrafficClass::DC, TrafficClass::DS, TrafficClass::BE,
                                        TrafficClass::FL};
inline constexpr ClassOrder kFlFirstOrder{TrafficClass::FL, TrafficClass::DC, TrafficClass::DS,
                                          TrafficClass::BE};
inline constexpr ClassOrder kDcFirstOrder{TrafficClass::DC, TrafficClass::FL, TrafficClass::DS,
                                          TrafficClass::BE};

/// Bit set over TrafficClass, used to restrict what a window may carry.
using ClassMask = std::uint8_t;
inline constexpr ClassMask kAllClassMask = 0x0F;
constexpr ClassMask mask_of(TrafficClass c) { return ClassMask(1u << index_of(c)); }

/// One transmission window seen from the ONU side during packing.
struct Bin {
  std::uint64_t capacity = 0;
  ClassMask accepts = kAllClassMask;
  std::uint64_t used = 0;
  std::vector<Frame> frames;
};

enum class QueueDiscipline : std::uint8_t { PerClass, Fifo };

/// ONU buffer: four class FIFOs, or one merged FIFO (FCFS). Byte counters
/// are per class in wire bytes either way.
class OnuQueues {
 public:
  explicit OnuQueues(QueueDiscipline d = QueueDiscipline::PerClass,
                     std::uint64_t buffer_bytes = 0);

  /// Returns false (and counts a drop) if a finite buffer would overflow.
  bool enqueue(const Frame& f);

  /// Strict priority over `order`; FIFO within a class. A class stops at its
  /// first head frame that does not fit; service moves on to the next class.
  /// Frames are never split. Under the Fifo discipline `order` is ignored
  /// and the global head blocks everything behind it.
  std::vector<Frame> dequeue_for_window(std::uint64_t budget_bytes, const ClassOrder& order);

  /// Multi-window form: each class in `order` places its head frame into the
  /// first bin that accepts the class and has room; when no bin fits the
  /// head, that class stops. With one bin this equals dequeue_for_window.
  void pack(std::span<Bin> bins, const ClassOrder& order);

  std::uint64_t bytes(TrafficClass c) const { return bytes_[index_of(c)]; }
  std::uint64_t total_bytes() const;
  std::size_t frames(TrafficClass c) const { return count_[index_of(c)]; }
  std::uint64_t drops(TrafficClass c) const { return drops_[index_of(c)]; }
  std::uint64_t buffer_bytes() const { return buffer_bytes_; }
  QueueDiscipline discipline() const { return discipline_; }
  std::optional<SimTime> head_arrival(TrafficClass c) const;

 private:
  std::deque<Frame>& lane(TrafficClass c);
  void take_front(std::deque<Frame>& q);

  QueueDiscipline discipline_;
  std::uint64_t buffer_bytes_;
  std::array<std::deque<Frame>, kNumClasses> lanes_;
  std::array<std::uint64_t, kNumClasses> bytes_{};
  std::array<std::size_t, kNumClasses> count_{};
  std::array<std::uint64_t, kNumClasses> drops_{};
};

struct ReportMsg {
  std::uint32_t onu = 0;
  SimTime sent_at{};
  std::array<std::uint64_t, kNumClasses> queue_bytes{};

  std::uint64_t total() const;
  std::uint64_t of(TrafficClass c) const { return queue_bytes[index_of(c)]; }
};

ReportMsg build_report(std::uint32_t onu, const OnuQueues& q, SimTime at);

enum class GrantPurpose : std::uint8_t { FlSlice, Conventional };
std::string_view to_string(GrantPurpose p);

/// Upstream window on the OLT reception timeline.
struct Grant {
  std::uint32_t wavelength = 0;
  SimTime start{};
  SimTime duration{};
  std::uint64_t data_bytes = 0;
  GrantPurpose purpose = GrantPurpose::Conventional;
  bool carries_report = false;

  SimTime end() const { return start + duration; }
};

struct GateMsg {
  std::uint32_t onu = 0;
  SimTime issued_at{};
  std::vector<Grant> grants;

  SimTime burst_start() const;
  SimTime burst_end() const;
  std::uint64_t data_bytes() const;
};

/// Back-to-back departure ends of `frames` from `grant.start`. Throws
/// GrantOverflow if they do not fit in the data part of the grant.
std::vector<SimTime> departure_times(const Grant& grant, std::span<const Frame> frames,
                                     std::uint64_t line_rate_bps);

}  // namespace ponsim
