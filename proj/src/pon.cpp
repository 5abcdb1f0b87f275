#include "ponsim/pon.hpp"

#include <algorithm>
#include <numeric>

#include "ponsim/errors.hpp"

namespace ponsim {

std::uint64_t SlaProfile::wmax_for(double bps, SimTime max_cycle) {
  return static_cast<std::uint64_t>(bps * to_seconds(max_cycle) / 8.0);
}

OnuQueues::OnuQueues(QueueDiscipline d, std::uint64_t buffer_bytes)
    : discipline_(d), buffer_bytes_(buffer_bytes) {}

std::deque<Frame>& OnuQueues::lane(TrafficClass c) {
  return discipline_ == QueueDiscipline::Fifo ? lanes_[0] : lanes_[index_of(c)];
}

std::uint64_t OnuQueues::total_bytes() const {
  return std::accumulate(bytes_.begin(), bytes_.end(), std::uint64_t{0});
}

bool OnuQueues::enqueue(const Frame& f) {
  const auto k = index_of(f.cls);
  if (buffer_bytes_ != 0 && total_bytes() + f.wire_bytes() > buffer_bytes_) {
    ++drops_[k];
    return false;
  }
  lane(f.cls).push_back(f);
  bytes_[k] += f.wire_bytes();
  ++count_[k];
  return true;
}

void OnuQueues::take_front(std::deque<Frame>& q) {
  const auto k = index_of(q.front().cls);
  bytes_[k] -= q.front().wire_bytes();
  --count_[k];
  q.pop_front();
}

std::optional<SimTime> OnuQueues::head_arrival(TrafficClass c) const {
  if (discipline_ == QueueDiscipline::Fifo) {
    for (const auto& f : lanes_[0]) {
      if (f.cls == c) return f.arrival;
    }
    return std::nullopt;
  }
  const auto& q = lanes_[index_of(c)];
  if (q.empty()) return std::nullopt;
  return q.front().arrival;
}

std::vector<Frame> OnuQueues::dequeue_for_window(std::uint64_t budget_bytes,
                                                 const ClassOrder& order) {
  Bin bin{budget_bytes, kAllClassMask, 0, {}};
  pack(std::span<Bin>(&bin, 1), order);
  return std::move(bin.frames);
}

namespace {

Bin* first_fit(std::span<Bin> bins, const Frame& f) {
  const ClassMask m = mask_of(f.cls);
  for (auto& b : bins) {
    if ((b.accepts & m) && b.used + f.wire_bytes() <= b.capacity) return &b;
  }
  return nullptr;
}

}  // namespace

void OnuQueues::pack(std::span<Bin> bins, const ClassOrder& order) {
  if (discipline_ == QueueDiscipline::Fifo) {
    auto& q = lanes_[0];
    while (!q.empty()) {
      Bin* b = first_fit(bins, q.front());
      if (b == nullptr) break;
      b->used += q.front().wire_bytes();
      b->frames.push_back(q.front());
      take_front(q);
    }
    return;
  }
  for (TrafficClass c : order) {
    auto& q = lanes_[index_of(c)];
    while (!q.empty()) {
      Bin* b = first_fit(bins, q.front());
      if (b == nullptr) break;
      b->used += q.front().wire_bytes();
      b->frames.push_back(q.front());
      take_front(q);
    }
  }
}

std::uint64_t ReportMsg::total() const {
  return std::accumulate(queue_bytes.begin(), queue_bytes.end(), std::uint64_t{0});
}

ReportMsg build_report(std::uint32_t onu, const OnuQueues& q, SimTime at) {
  ReportMsg r;
  r.onu = onu;
  r.sent_at = at;
  for (auto c : kAllClasses) r.queue_bytes[index_of(c)] = q.bytes(c);
  return r;
}

std::string_view to_string(GrantPurpose p) {
  return p == GrantPurpose::FlSlice ? "fl_slice" : "conventional";
}

SimTime GateMsg::burst_start() const {
  SimTime t = kNever;
  for (const auto& g : grants) t = std::min(t, g.start);
  return t;
}

SimTime GateMsg::burst_end() const {
  SimTime t{0};
  for (const auto& g : grants) t = std::max(t, g.end());
  return t;
}

std::uint64_t GateMsg::data_bytes() const {
  std::uint64_t b = 0;
  for (const auto& g : grants) b += g.data_bytes;
  return b;
}

std::vector<SimTime> departure_times(const Grant& grant, std::span<const Frame> frames,
                                     std::uint64_t line_rate_bps) {
  std::vector<SimTime> out;
  out.reserve(frames.size());
  std::uint64_t cum = 0;
  for (const auto& f : frames) {
    cum += f.wire_bytes();
    out.push_back(grant.start + airtime(cum, line_rate_bps));
  }
  if (cum > grant.data_bytes || (!out.empty() && out.back() > grant.end())) {
    throw GrantOverflow("frames exceed the granted window on wavelength " +
                        std::to_string(grant.wavelength));
  }
  return out;
}

}  // namespace ponsim
