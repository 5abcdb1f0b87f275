#include "ponsim/sched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ponsim/errors.hpp"

namespace ponsim {

std::string_view to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::IpactLimited: return "IPACT_LIMITED";
    case SchedulerKind::MwBs: return "MW_BS";
    case SchedulerKind::DwbaFl: return "DWBA_FL";
    case SchedulerKind::Fcfs: return "FCFS";
  }
  return "?";
}

std::string_view to_string(PriorityPolicy p) {
  return p == PriorityPolicy::FlFirst ? "FL_FIRST" : "DC_FIRST";
}

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view s) {
  for (auto k : {SchedulerKind::IpactLimited, SchedulerKind::MwBs, SchedulerKind::DwbaFl,
                 SchedulerKind::Fcfs}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<PriorityPolicy> parse_priority_policy(std::string_view s) {
  if (s == "FL_FIRST") return PriorityPolicy::FlFirst;
  if (s == "DC_FIRST") return PriorityPolicy::DcFirst;
  return std::nullopt;
}

void SchedulerConfig::validate(std::uint64_t line_rate_bps) const {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  if (max_cycle.count() <= 0) throw ValidationError("max_cycle must be positive");
  if (guard.count() < 0) throw ValidationError("guard must be non-negative");
  if (kind == SchedulerKind::MwBs &&
      slice_bytes_per_cycle(theta, max_cycle, line_rate_bps) < kMaxWireFrame) {
    throw ValidationError("theta * max_cycle must carry at least one maximum-size frame");
  }
}

ClassOrder service_order(const SchedulerConfig& cfg) {
  if (cfg.kind == SchedulerKind::DwbaFl) {
    return cfg.priority == PriorityPolicy::FlFirst ? kFlFirstOrder : kDcFirstOrder;
  }
  return kIpactOrder;
}

QueueDiscipline queue_discipline(const SchedulerConfig& cfg) {
  return cfg.kind == SchedulerKind::Fcfs ? QueueDiscipline::Fifo : QueueDiscipline::PerClass;
}

std::uint64_t slice_bytes_per_cycle(double theta, SimTime max_cycle,
                                    std::uint64_t line_rate_bps) {
  const SimTime span{std::llround(theta * static_cast<double>(max_cycle.count()))};
  return bytes_in(span, line_rate_bps);
}

std::uint64_t SliceState::on_report(std::uint32_t onu, std::uint64_t fl_request) {
  if (!reserved_for_) {
    if (fl_request == 0) return 0;
    reserved_for_ = onu;
    remaining_ = fl_request;
    demand_ = fl_request;
    granted_ = 0;
    ++started_;
  } else if (*reserved_for_ != onu) {
    return 0;
  }
  const std::uint64_t g = std::min(remaining_, slice_bytes_);
  remaining_ -= g;
  granted_ += g;
  if (remaining_ == 0) {
    if (granted_ != demand_) ++conservation_violations_;
    ++completed_;
    reserved_for_.reset();
  }
  return g;
}

GrantSizing size_ipact(const ReportMsg& r, std::uint64_t wmax) {
  return {0, limited_grant(r.total(), wmax)};
}

GrantSizing size_dwbafl(const ReportMsg& r, std::uint64_t wmax) {
  return {0, limited_grant(r.total(), wmax)};
}

GrantSizing size_fcfs(const ReportMsg& r, std::uint64_t wmax) {
  return {0, limited_grant(r.total(), wmax)};
}

GrantSizing size_mwbs(const ReportMsg& r, std::uint64_t wmax, SliceState& slice) {
  GrantSizing s;
  s.fl_bytes = slice.on_report(r.onu, r.of(TrafficClass::FL));
  s.conventional_bytes = limited_grant(r.total() - r.of(TrafficClass::FL), wmax);
  return s;
}

Olt::Olt(SchedulerConfig cfg, std::vector<ChannelState> channels, std::vector<SlaProfile> slas,
         std::vector<SimTime> rtt, std::vector<GroupState> groups)
    : cfg_(std::move(cfg)),
      channels_(std::move(channels)),
      slas_(std::move(slas)),
      rtt_(std::move(rtt)),
      groups_(std::move(groups)) {
  if (channels_.empty()) throw NoChannelError("no wavelength channels configured");
  if (rtt_.size() != slas_.size()) throw ConfigError("rtt and sla lists differ in length");
  last_end_.assign(channels_.size(), SimTime{std::numeric_limits<std::int64_t>::min() / 2});
  slice_ = SliceState(cfg_.kind == SchedulerKind::MwBs
                          ? slice_bytes_per_cycle(cfg_.theta, cfg_.max_cycle,
                                                  channels_[0].line_rate_bps)
                          : 0);
  const std::uint64_t n = slas_.size();
  const std::uint64_t slice_share = n ? (slice_.slice_bytes() + n - 1) / n : 0;
  for (const auto& s : slas_) {
    const std::uint64_t w = s.wmax_bytes > slice_share ? s.wmax_bytes - slice_share : 0;
    wmax_.push_back(cfg_.kind == SchedulerKind::MwBs ? w : s.wmax_bytes);
  }
  group_index_.assign(slas_.size(), std::nullopt);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (auto m : groups_[g].members) {
      if (m >= slas_.size()) throw ConfigError("group member outside the ONU range");
      group_index_[m] = g;
    }
  }
}

std::optional<std::size_t> Olt::group_of(std::uint32_t onu) const {
  return onu < group_index_.size() ? group_index_[onu] : std::nullopt;
}

std::vector<GateMsg> Olt::on_report(const ReportMsg& r, SimTime now) {
  if (auto g = group_of(r.onu)) {
    auto& group = groups_[*g];
    std::erase_if(group.buffered, [&](const ReportMsg& b) { return b.onu == r.onu; });
    group.buffered.push_back(r);
    if (!group.complete()) return {};
    const auto order = group.buffered;
    DemandSet demands;
    for (const auto& b : order) demands.push_back({b.onu, b.total(), slas_[b.onu].wmax_bytes});
    const auto sizes = group_schedule(group, demands);
    std::vector<GateMsg> out;
    for (const auto& b : order) {
      out.push_back(make_gate(b.onu, {0, sizes.at(b.onu)}, now));
      check_and_commit(out.back(), std::numeric_limits<std::uint64_t>::max());
    }
    return out;
  }

  GrantSizing s;
  switch (cfg_.kind) {
    case SchedulerKind::IpactLimited: s = size_ipact(r, wmax_[r.onu]); break;
    case SchedulerKind::DwbaFl: s = size_dwbafl(r, wmax_[r.onu]); break;
    case SchedulerKind::Fcfs: s = size_fcfs(r, wmax_[r.onu]); break;
    case SchedulerKind::MwBs: s = size_mwbs(r, wmax_[r.onu], slice_); break;
  }
  std::uint64_t cap = wmax_[r.onu] + slice_.slice_bytes();
  if (cfg_.wavelength.kind == WavelengthPolicyKind::SSD) {
    cap += 2 * channels_.size() * kMaxWireFrame;
  }
  GateMsg gate = make_gate(r.onu, s, now);
  check_and_commit(gate, cap);
  return {std::move(gate)};
}

GateMsg Olt::poll(std::uint32_t onu, SimTime now) {
  GateMsg gate = make_gate(onu, {}, now);
  check_and_commit(gate, 0);
  return gate;
}

GateMsg Olt::make_gate(std::uint32_t onu, const GrantSizing& s, SimTime now) {
  GateMsg gate;
  gate.onu = onu;
  gate.issued_at = now;
  const SimTime earliest = now + rtt_[onu];
  const SimTime guard = cfg_.guard;
  const auto rate = [&](std::uint32_t k) { return channels_[k].line_rate_bps; };

  if (s.fl_bytes + s.conventional_bytes == 0) {
    const std::uint32_t k = cfg_.wavelength.kind == WavelengthPolicyKind::MSD
                                ? cfg_.wavelength.msd_channel(onu, channels_.size())
                                : first_fit_channel(channels_, earliest, guard);
    if (k >= channels_.size()) throw NoChannelError("onu mapped to a missing wavelength");
    const SimTime start = feasible_start(channels_[k], earliest, guard);
    gate.grants.push_back(
        {k, start, airtime(kReportBytes, rate(k)), 0, GrantPurpose::Conventional, true});
    return gate;
  }

  std::vector<ChannelPortion> fl;
  std::vector<ChannelPortion> conv;
  if (s.fl_bytes > 0) {
    fl = assign(cfg_.wavelength, onu, s.fl_bytes, earliest, channels_, guard, kMaxWireFrame);
  }
  if (s.conventional_bytes > 0) {
    conv = assign(cfg_.wavelength, onu, s.conventional_bytes, earliest, channels_, guard,
                  kMaxWireFrame);
  }
  for (const auto& p : fl) {
    gate.grants.push_back(
        {p.wavelength, p.start, airtime(p.bytes, rate(p.wavelength)), p.bytes,
         GrantPurpose::FlSlice, false});
  }
  for (const auto& p : conv) {
    SimTime start = p.start;
    for (const auto& g : gate.grants) {
      if (g.wavelength == p.wavelength) start = std::max(start, g.end());
    }
    gate.grants.push_back({p.wavelength, start, airtime(p.bytes, rate(p.wavelength)), p.bytes,
                           GrantPurpose::Conventional, false});
  }

  // The REPORT rides at the tail of the last window of the burst.
  std::size_t last = 0;
  for (std::size_t i = 1; i < gate.grants.size(); ++i) {
    const auto& a = gate.grants[i];
    const auto& b = gate.grants[last];
    if (a.end() > b.end() || (a.end() == b.end() && a.wavelength < b.wavelength)) last = i;
  }
  auto& tail = gate.grants[last];
  tail.carries_report = true;
  tail.duration = airtime(tail.data_bytes + kReportBytes, rate(tail.wavelength));
  return gate;
}

void Olt::flag(std::uint64_t& counter, const std::string& what, SimTime at) {
  ++counter;
  if (violations_.first_at_ns < 0) {
    violations_.first_at_ns = at.count();
    violations_.first = what;
  }
}

void Olt::check_and_commit(const GateMsg& g, std::uint64_t cap) {
  const SimTime earliest = g.issued_at + rtt_[g.onu];
  std::vector<SimTime> burst_end(channels_.size(), SimTime{-1});
  for (const auto& gr : g.grants) {
    const auto k = gr.wavelength;
    if (gr.start < earliest) {
      flag(violations_.causality,
           "grant for onu " + std::to_string(g.onu) + " starts before its gate can arrive",
           g.issued_at);
    }
    const bool same_burst = burst_end[k] == gr.start;
    if (!same_burst && gr.start < last_end_[k] + cfg_.guard) {
      flag(violations_.guard,
           "grant on wavelength " + std::to_string(k) + " breaks guard separation", gr.start);
    }
    if (gr.duration.count() <= 0) {
      flag(violations_.window, "grant with non-positive duration", gr.start);
    }
    burst_end[k] = gr.end();
    last_end_[k] = std::max(last_end_[k], gr.end());
    channels_[k].next_free = std::max(channels_[k].next_free, gr.end());
    if (gate_log_ != nullptr) {
      *gate_log_ << g.issued_at.count() << ',' << g.onu << ',' << to_string(gr.purpose) << ','
                 << k << ',' << gr.start.count() << ',' << gr.duration.count() << '\n';
    }
  }
  if (g.data_bytes() > cap) {
    flag(violations_.window,
         "gate for onu " + std::to_string(g.onu) + " exceeds its window limit", g.issued_at);
  }
}

std::vector<Bin> Olt::bins_for(const GateMsg& gate) const {
  std::vector<Bin> bins;
  bins.reserve(gate.grants.size());
  constexpr ClassMask kConventional = kAllClassMask & ~mask_of(TrafficClass::FL);
  for (const auto& g : gate.grants) {
    ClassMask accepts = kAllClassMask;
    if (g.purpose == GrantPurpose::FlSlice) {
      accepts = mask_of(TrafficClass::FL);
    } else if (cfg_.kind == SchedulerKind::MwBs) {
      accepts = kConventional;
    }
    bins.push_back({g.data_bytes, accepts, 0, {}});
  }
  return bins;
}

}  // namespace ponsim
