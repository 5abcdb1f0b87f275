#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace ponsim {

/// Simulation clock. One tick is one nanosecond; every configured quantity
/// (guard time, RTT, cycle length, run length) is held as an integer count.
using SimTime = std::chrono::nanoseconds;
using namespace std::chrono_literals;

inline constexpr SimTime kNever = SimTime::max();

inline double to_seconds(SimTime t) { return static_cast<double>(t.count()) * 1e-9; }

inline SimTime from_seconds(double s) {
  return SimTime{static_cast<std::int64_t>(std::llround(s * 1e9))};
}

inline SimTime from_micros(double us) {
  return SimTime{static_cast<std::int64_t>(std::llround(us * 1e3))};
}

/// Serialization time of `bytes` at `rate_bps`, rounded up to the next tick so
/// that a window sized with it always holds the bytes.
inline SimTime airtime(std::uint64_t bytes, std::uint64_t rate_bps) {
  if (bytes < (1ull << 31)) {
    const std::uint64_t bits_ns = bytes * 8'000'000'000ull;
    return SimTime{static_cast<std::int64_t>((bits_ns + rate_bps - 1) / rate_bps)};
  }
  const auto bits_ns = static_cast<unsigned __int128>(bytes) * 8u * 1'000'000'000u;
  const auto q = bits_ns / rate_bps;
  const auto r = bits_ns % rate_bps;
  return SimTime{static_cast<std::int64_t>(q + (r != 0 ? 1 : 0))};
}

/// Bytes that fit in `span` at `rate_bps` (rounded down).
inline std::uint64_t bytes_in(SimTime span, std::uint64_t rate_bps) {
  if (span.count() <= 0) return 0;
  const auto bits = static_cast<unsigned __int128>(span.count()) * rate_bps / 1'000'000'000u;
  return static_cast<std::uint64_t>(bits / 8u);
}

}  // namespace ponsim
