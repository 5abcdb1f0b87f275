#include "ponsim/engine.hpp"

#include "ponsim/errors.hpp"

namespace ponsim {

std::uint64_t Engine::schedule(SimTime at, EventKind kind, std::uint32_t target,
                               std::uint64_t arg) {
  if (at < now_) {
    throw PastEventError("event at " + std::to_string(at.count()) + " ns scheduled when now is " +
                         std::to_string(now_.count()) + " ns");
  }
  const std::uint64_t seq = scheduled_++;
  queue_.push(Event{at, seq, kind, target, arg});
  return seq;
}

std::uint64_t Engine::run_until(SimTime t_end) {
  std::uint64_t count = 0;
  while (!queue_.empty() && queue_.top().fire_at <= t_end) {
    const Event ev = queue_.top();
    queue_.pop();
    now_ = ev.fire_at;
    ++processed_;
    ++count;
    if (handler_) handler_(ev);
  }
  if (t_end > now_) now_ = t_end;
  return count;
}

RngStream& Engine::rng(std::string_view name) {
  auto it = streams_.find(name);
  if (it == streams_.end()) {
    std::string key{name};
    it = streams_.emplace(key, RngStream{key, derive_stream_key(master_seed_, name)}).first;
  }
  return it->second;
}

}  // namespace ponsim
