#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ponsim/dba.hpp"
#include "ponsim/pon.hpp"
#include "ponsim/twdm.hpp"

namespace ponsim {

enum class SchedulerKind : std::uint8_t { IpactLimited, MwBs, DwbaFl, Fcfs };
enum class PriorityPolicy : std::uint8_t { FlFirst, DcFirst };

std::string_view to_string(SchedulerKind k);
std::string_view to_string(PriorityPolicy p);
std::optional<SchedulerKind> parse_scheduler_kind(std::string_view s);
std::optional<PriorityPolicy> parse_priority_policy(std::string_view s);

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::DwbaFl;
  PriorityPolicy priority = PriorityPolicy::DcFirst;
  double theta = 0.015;
  WavelengthPolicy wavelength;
  SimTime max_cycle = 1ms;
  SimTime guard = 624ns;

  /// Throws ValidationError unless theta lies in (0, 1) and, for MW-BS, the
  /// slice carries at least one maximum-size frame.
  void validate(std::uint64_t line_rate_bps) const;
};

/// Intra-ONU order for conventional windows.
ClassOrder service_order(const SchedulerConfig& cfg);
QueueDiscipline queue_discipline(const SchedulerConfig& cfg);

/// floor(theta * Z * line_rate / 8), with theta * Z rounded to whole ns.
std::uint64_t slice_bytes_per_cycle(double theta, SimTime max_cycle, std::uint64_t line_rate_bps);

/// MW-BS slice reservation. The holder keeps the slice until the bytes
/// granted to it reach the FL backlog it reported when the reservation
/// began; any residue left in its queue then competes again.
class SliceState {
 public:
  explicit SliceState(std::uint64_t slice_bytes_per_cycle = 0)
      : slice_bytes_(slice_bytes_per_cycle) {}

  /// FL bytes granted to `onu` on this report (0 when another ONU holds the
  /// slice or nothing is requested).
  std::uint64_t on_report(std::uint32_t onu, std::uint64_t fl_request);

  std::optional<std::uint32_t> reserved_for() const { return reserved_for_; }
  std::uint64_t remaining() const { return remaining_; }
  std::uint64_t slice_bytes() const { return slice_bytes_; }

  std::uint64_t reservations_started() const { return started_; }
  std::uint64_t reservations_completed() const { return completed_; }
  /// Completed reservations whose granted total differed from the demand.
  std::uint64_t conservation_violations() const { return conservation_violations_; }
  /// Reservations opened while another ONU still held the slice.
  std::uint64_t exclusivity_violations() const { return exclusivity_violations_; }

 private:
  std::uint64_t slice_bytes_;
  std::optional<std::uint32_t> reserved_for_;
  std::uint64_t remaining_ = 0;
  std::uint64_t demand_ = 0;
  std::uint64_t granted_ = 0;
  std::uint64_t started_ = 0;
  std::uint64_t completed_ = 0;
  std::uint64_t conservation_violations_ = 0;
  std::uint64_t exclusivity_violations_ = 0;
};

/// Sizes of one gate before channel placement.
struct GrantSizing {
  std::uint64_t fl_bytes = 0;
  std::uint64_t conventional_bytes = 0;
};

GrantSizing size_ipact(const ReportMsg& r, std::uint64_t wmax);
GrantSizing size_dwbafl(const ReportMsg& r, std::uint64_t wmax);
GrantSizing size_fcfs(const ReportMsg& r, std::uint64_t wmax);
/// Slice first, then the conventional classes against `wmax`.
GrantSizing size_mwbs(const ReportMsg& r, std::uint64_t wmax, SliceState& slice);

struct OltViolations {
  std::uint64_t guard = 0;
  std::uint64_t causality = 0;
  std::uint64_t window = 0;
  long long first_at_ns = -1;
  std::string first;

  std::uint64_t total() const { return guard + causality + window; }
};

/// OLT side of the polling loop: turns reports into gates and owns the
/// channel timeline, the MW-BS slice and SLA group buffers.
class Olt {
 public:
  Olt(SchedulerConfig cfg, std::vector<ChannelState> channels, std::vector<SlaProfile> slas,
      std::vector<SimTime> rtt, std::vector<GroupState> groups = {});

  /// Gates released by this report: none while an SLA group is still
  /// waiting for members, several when it completes.
  std::vector<GateMsg> on_report(const ReportMsg& r, SimTime now);

  /// Report-only window used to start the polling loop.
  GateMsg poll(std::uint32_t onu, SimTime now);

  /// Bins matching the gate's windows, in grant order.
  std::vector<Bin> bins_for(const GateMsg& gate) const;

  const SchedulerConfig& config() const { return cfg_; }
  const std::vector<ChannelState>& channels() const { return channels_; }
  const SliceState& slice() const { return slice_; }
  const OltViolations& violations() const { return violations_; }
  std::uint64_t wmax(std::uint32_t onu) const { return wmax_[onu]; }
  std::size_t n_onus() const { return slas_.size(); }

  /// Optional per-grant log: t_issue,onu,purpose,wavelength,start,duration.
  void set_gate_log(std::ostream* os) { gate_log_ = os; }

 private:
  GateMsg make_gate(std::uint32_t onu, const GrantSizing& s, SimTime now);
  void check_and_commit(const GateMsg& g, std::uint64_t cap);
  void flag(std::uint64_t& counter, const std::string& what, SimTime at);
  std::optional<std::size_t> group_of(std::uint32_t onu) const;

  SchedulerConfig cfg_;
  std::vector<ChannelState> channels_;
  std::vector<SlaProfile> slas_;
  std::vector<std::uint64_t> wmax_;
  std::vector<SimTime> rtt_;
  std::vector<GroupState> groups_;
  std::vector<std::optional<std::size_t>> group_index_;
  std::vector<SimTime> last_end_;
  SliceState slice_;
  OltViolations violations_;
  std::ostream* gate_log_ = nullptr;
};

}  // namespace ponsim
