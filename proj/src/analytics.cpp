#include "ponsim/analytics.hpp"

#include <algorithm>

#include "ponsim/errors.hpp"

namespace ponsim {

SimTime wmax_per_onu(SimTime cycle, std::uint32_t n_onus, SimTime guard) {
  if (n_onus == 0) throw ConfigError("wmax needs at least one ONU");
  if (cycle <= guard * n_onus) throw ConfigError("cycle must exceed n_onus * guard");
  return (cycle - guard * n_onus) / n_onus;
}

double wmax_per_onu_us(double cycle_us, std::uint32_t n_onus, double guard_us) {
  if (n_onus == 0) throw ConfigError("wmax needs at least one ONU");
  if (cycle_us <= n_onus * guard_us) throw ConfigError("cycle must exceed n_onus * guard");
  return (cycle_us - n_onus * guard_us) / n_onus;
}

double ipact_waste_percent(SimTime cycle, SimTime rtt) {
  if (cycle.count() <= 0) throw ConfigError("cycle must be positive");
  return 100.0 * static_cast<double>(rtt.count()) / static_cast<double>(cycle.count());
}

Waste gsipact_waste(const WasteInputs& in) {
  if (in.n_group > in.n_onus) throw ConfigError("group larger than the ONU count");
  if (in.wlength_percent < 0.0 || in.wlength_percent > 100.0) {
    throw ConfigError("wlength_percent must lie in [0, 100]");
  }
  Waste w;
  if (in.per_onu_windows) {
    SimTime busy{0};
    for (const auto& o : *in.per_onu_windows) busy += o.wlength + o.guard;
    w.seconds = std::max(SimTime{0}, in.rtt - busy);
  }
  if (in.n_onus > 0 && in.cycle.count() > 0) {
    const double wmax_ns =
        wmax_per_onu_us(static_cast<double>(in.cycle.count()), in.n_onus,
                        static_cast<double>(in.guard.count()));
    const double per = in.wlength_percent * wmax_ns / 100.0 + static_cast<double>(in.guard.count());
    const double idle =
        std::max(0.0, static_cast<double>(in.rtt.count()) - (in.n_onus - in.n_group) * per);
    w.percent = 100.0 * idle / static_cast<double>(in.cycle.count());
  }
  return w;
}

}  // namespace ponsim
