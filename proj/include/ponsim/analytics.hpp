#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ponsim/time.hpp"

namespace ponsim {

/// (cycle - n * guard) / n. Throws ConfigError unless cycle > n * guard.
/// Integer nanoseconds, rounded down.
SimTime wmax_per_onu(SimTime cycle, std::uint32_t n_onus, SimTime guard);

/// Same quantity in exact floating microseconds.
double wmax_per_onu_us(double cycle_us, std::uint32_t n_onus, double guard_us);

/// 100 * rtt / cycle.
double ipact_waste_percent(SimTime cycle, SimTime rtt);

struct OnuWindow {
  SimTime wlength{};
  SimTime guard{};
};

struct WasteInputs {
  SimTime cycle{};
  SimTime rtt{};
  std::uint32_t n_onus = 0;
  std::uint32_t n_group = 0;
  SimTime guard{};
  double wlength_percent = 100.0;
  /// Windows of the ONUs outside the group, for the seconds form.
  std::optional<std::vector<OnuWindow>> per_onu_windows;
};

struct Waste {
  SimTime seconds{};
  double percent = 0.0;
};

/// Idle time while a group waits for its last report, filled only by the
/// windows of the ONUs outside the group:
///   seconds = max(0, RTT - sum(Wlength_i + GT_i))
///   percent = 100 * max(0, RTT - (n - n_group) * (Wlength% * Wmax / 100 + GT)) / cycle
/// The closed form stated as the no-waste condition, RTT > sum(...), points
/// the other way; that inequality would call the channel busy exactly when
/// the subtraction above leaves idle time. The subtraction is implemented,
/// clamped at zero.
Waste gsipact_waste(const WasteInputs& in);

}  // namespace ponsim
