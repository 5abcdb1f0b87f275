#include "ponsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ponsim/errors.hpp"

namespace ponsim {

std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::FL: return "FL";
    case TrafficClass::DC: return "DC";
    case TrafficClass::DS: return "DS";
    case TrafficClass::BE: return "BE";
  }
  return "?";
}

std::optional<TrafficClass> parse_traffic_class(std::string_view s) {
  for (auto c : kAllClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

bool frame_is_valid(const Frame& f) {
  if (f.payload_bytes < kMinPayload || f.payload_bytes > kMaxPayload) return false;
  return f.fl_round.has_value() == (f.cls == TrafficClass::FL);
}

namespace {

std::uint64_t make_id(std::uint32_t onu, std::uint64_t k) {
  return (std::uint64_t{onu} << 40) | (k & ((1ull << 40) - 1));
}

}  // namespace

// --- CBR -------------------------------------------------------------------

double CbrSpec::rate_bps() const {
  return 8.0 * packet_bytes / to_seconds(interarrival);
}

void CbrSpec::validate() const {
  if (packet_bytes == 0) throw ConfigError("cbr packet size must be positive");
  if (interarrival.count() <= 0) throw ConfigError("cbr interarrival must be positive");
}

CbrSource::CbrSource(CbrSpec spec, std::uint32_t onu, TrafficClass cls)
    : spec_(spec), onu_(onu), cls_(cls), next_(spec.interarrival) {
  spec_.validate();
}

Frame CbrSource::pop() {
  Frame f;
  f.id = make_id(onu_, static_cast<std::uint64_t>(next_.count() / spec_.interarrival.count()));
  f.onu = onu_;
  f.cls = cls_;
  f.payload_bytes = spec_.packet_bytes;
  f.overhead_bytes = spec_.overhead_bytes;
  f.arrival = next_;
  next_ += spec_.interarrival;
  return f;
}

std::vector<Frame> cbr_arrivals(const CbrSpec& spec, SimTime horizon, std::uint32_t onu) {
  CbrSource src(spec, onu);
  std::vector<Frame> out;
  while (src.peek() <= horizon) out.push_back(src.pop());
  return out;
}

// --- Pareto ON/OFF ---------------------------------------------------------

double ParetoOnOffSpec::mean_burst_bytes() const {
  const BoundedPareto b{effective_burst_shape(), burst_min, burst_max};
  // Uniform integer payload p on [64, 1518]; ladder overshoot E[p^2]/(2E[p]) + 1/2.
  const double lo = kMinPayload;
  const double hi = kMaxPayload;
  const double mean_p = 0.5 * (lo + hi);
  const double var_p = ((hi - lo + 1.0) * (hi - lo + 1.0) - 1.0) / 12.0;
  return b.mean() + (var_p + mean_p * mean_p) / (2.0 * mean_p) + 0.5;
}

double ParetoOnOffSpec::on_rate_bps() const {
  return mean_burst_bytes() * 8.0 / to_seconds(mean_on);
}

std::uint32_t ParetoOnOffSpec::substreams() const {
  if (target_rate_bps <= 0.0) return 0;
  return static_cast<std::uint32_t>(std::ceil(target_rate_bps / (duty * on_rate_bps())));
}

double ParetoOnOffSpec::effective_duty() const {
  const auto k = substreams();
  return k == 0 ? 0.0 : target_rate_bps / (k * on_rate_bps());
}

SimTime ParetoOnOffSpec::mean_off() const {
  const double d = effective_duty();
  if (d <= 0.0) return kNever;
  return from_seconds(to_seconds(mean_on) * (1.0 - d) / d);
}

void ParetoOnOffSpec::validate() const {
  if (!(hurst > 0.5 && hurst < 1.0)) throw ConfigError("hurst must lie in (0.5, 1)");
  if (!(burst_min > 0.0) || burst_min >= burst_max) {
    throw ConfigError("pareto burst_min must be positive and below burst_max");
  }
  if (target_rate_bps < 0.0) throw ConfigError("pareto target rate must be non-negative");
  if (mean_on.count() <= 0) throw ConfigError("pareto mean_on must be positive");
  if (!(duty > 0.0 && duty < 1.0)) throw ConfigError("pareto duty must lie in (0, 1)");
  if (burst_shape < 0.0) throw ConfigError("pareto burst_shape must be non-negative");
}

ParetoOnOffSource::ParetoOnOffSource(const ParetoOnOffSpec& spec, RngStream& rng,
                                     std::uint32_t onu, TrafficClass cls)
    : spec_(spec),
      rng_(&rng),
      onu_(onu),
      cls_(cls),
      burst_{spec.effective_burst_shape(), spec.burst_min, spec.burst_max},
      off_{spec.shape_on(), 1.0, spec.burst_max / spec.burst_min} {
  spec_.validate();
  const std::uint32_t k = spec_.substreams();
  if (k == 0) return;
  ns_per_byte_ = 8e9 / spec_.on_rate_bps();
  const double mean_off_ns = static_cast<double>(spec_.mean_off().count());
  off_scale_ = mean_off_ns / off_.mean();
  const double cycle_ns = static_cast<double>(spec_.mean_on.count()) + mean_off_ns;
  subs_.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    subs_[i].cursor_ns = rng_->uniform(0.0, cycle_ns);
    start_burst(subs_[i]);
    heap_.emplace(subs_[i].next, i);
  }
}

void ParetoOnOffSource::start_burst(Sub& s) {
  s.budget = burst_.sample(*rng_);
  prepare_frame(s);
}

void ParetoOnOffSource::prepare_frame(Sub& s) {
  s.payload = static_cast<std::uint16_t>(rng_->uniform_int(kMinPayload, kMaxPayload));
  s.next = SimTime{std::llround(s.cursor_ns)};
}

Frame ParetoOnOffSource::pop() {
  const auto [at, i] = heap_.top();
  heap_.pop();
  Sub& s = subs_[i];
  Frame f;
  f.id = make_id(onu_, (std::uint64_t{static_cast<std::uint8_t>(cls_)} << 36) ^ emitted_++);
  f.onu = onu_;
  f.cls = cls_;
  f.payload_bytes = s.payload;
  f.overhead_bytes = spec_.overhead_bytes;
  f.arrival = at;

  s.cursor_ns += s.payload * ns_per_byte_;
  s.budget -= s.payload;
  if (s.budget > 0.0) {
    prepare_frame(s);
  } else {
    s.cursor_ns += off_.sample(*rng_) * off_scale_;
    start_burst(s);
  }
  heap_.emplace(s.next, i);
  return f;
}

std::vector<Frame> pareto_onoff_arrivals(const ParetoOnOffSpec& spec, RngStream& rng,
                                         SimTime horizon, std::uint32_t onu, TrafficClass cls) {
  ParetoOnOffSource src(spec, rng, onu, cls);
  std::vector<Frame> out;
  while (src.peek() <= horizon) out.push_back(src.pop());
  return out;
}

// --- FL --------------------------------------------------------------------

double FlWorkloadSpec::nominal_rate_bps() const {
  const SimTime period = sync_window + aggregation_delay;
  if (period.count() <= 0) return 0.0;
  return static_cast<double>(payload_bytes_per_round) * 8.0 / to_seconds(period);
}

void FlWorkloadSpec::validate() const {
  if (payload_bytes_per_round == 0) throw ConfigError("fl payload per round must be positive");
  if (compute_min.count() < 0 || compute_max < compute_min) {
    throw ConfigError("fl compute range must satisfy 0 <= min <= max");
  }
  if (downstream_delay.count() < 0 || aggregation_delay.count() < 0) {
    throw ConfigError("fl delays must be non-negative");
  }
  if (sync_window.count() <= 0) throw ConfigError("fl sync window must be positive");
}

std::vector<Frame> fl_round_frames(const FlWorkloadSpec& spec, std::uint32_t client,
                                   std::uint32_t round, SimTime release) {
  std::vector<Frame> out;
  const std::uint64_t total = spec.payload_bytes_per_round;
  const std::uint64_t n = (total + kMtu - 1) / kMtu;
  out.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::uint64_t left = total - k * kMtu;
    Frame f;
    f.id = make_id(client, (std::uint64_t{round} << 20) | k);
    f.onu = client;
    f.cls = TrafficClass::FL;
    f.payload_bytes = static_cast<std::uint16_t>(
        std::max<std::uint64_t>(kMinPayload, std::min<std::uint64_t>(kMtu, left)));
    f.overhead_bytes = spec.overhead_bytes;
    f.arrival = release;
    f.fl_round = round;
    out.push_back(f);
  }
  return out;
}

void write_frame_trace(std::ostream& os, std::span<const Frame> frames) {
  for (const auto& f : frames) {
    os << f.arrival.count() << ' ' << f.onu << ' ' << to_string(f.cls) << ' ' << f.wire_bytes()
       << '\n';
  }
}

}  // namespace ponsim
