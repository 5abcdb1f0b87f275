#include "ponsim/twdm.hpp"

#include <algorithm>

#include "ponsim/errors.hpp"

namespace ponsim {

std::string_view to_string(WavelengthPolicyKind k) {
  switch (k) {
    case WavelengthPolicyKind::SSD: return "SSD";
    case WavelengthPolicyKind::MSD: return "MSD";
    case WavelengthPolicyKind::FF: return "FF";
  }
  return "?";
}

std::optional<WavelengthPolicyKind> parse_wavelength_policy(std::string_view s) {
  if (s == "SSD") return WavelengthPolicyKind::SSD;
  if (s == "MSD") return WavelengthPolicyKind::MSD;
  if (s == "FF") return WavelengthPolicyKind::FF;
  return std::nullopt;
}

std::uint32_t WavelengthPolicy::msd_channel(std::uint32_t onu, std::size_t n_channels) const {
  if (onu < msd_map.size()) return msd_map[onu];
  return static_cast<std::uint32_t>(onu % n_channels);
}

SimTime feasible_start(const ChannelState& ch, SimTime earliest, SimTime guard) {
  return std::max(earliest, ch.next_free + guard);
}

std::uint32_t first_fit_channel(std::span<const ChannelState> channels, SimTime earliest,
                                SimTime guard) {
  if (channels.empty()) throw NoChannelError("no wavelength channels configured");
  std::uint32_t best = 0;
  SimTime best_t = feasible_start(channels[0], earliest, guard);
  for (std::uint32_t k = 1; k < channels.size(); ++k) {
    const SimTime t = feasible_start(channels[k], earliest, guard);
    if (t < best_t) {
      best = k;
      best_t = t;
    }
  }
  return best;
}

std::vector<std::uint64_t> split_even(std::uint64_t bytes, std::size_t n) {
  std::vector<std::uint64_t> out(n, n ? bytes / n : 0);
  for (std::size_t k = 0; n && k < bytes % n; ++k) ++out[k];
  return out;
}

std::vector<ChannelPortion> assign(const WavelengthPolicy& policy, std::uint32_t onu,
                                   std::uint64_t bytes, SimTime earliest,
                                   std::span<const ChannelState> channels, SimTime guard,
                                   std::uint64_t min_share) {
  if (channels.empty()) throw NoChannelError("no wavelength channels configured");
  std::vector<ChannelPortion> out;
  switch (policy.kind) {
    case WavelengthPolicyKind::SSD: {
      const auto shares = split_even(bytes, channels.size());
      const std::uint64_t floor_share = std::min(bytes, min_share);
      for (std::uint32_t k = 0; k < channels.size(); ++k) {
        const std::uint64_t b = std::max(shares[k], floor_share);
        if (b == 0) continue;
        out.push_back({k, feasible_start(channels[k], earliest, guard), b});
      }
      break;
    }
    case WavelengthPolicyKind::MSD: {
      const auto k = policy.msd_channel(onu, channels.size());
      if (k >= channels.size()) {
        throw NoChannelError("onu " + std::to_string(onu) + " mapped to missing wavelength " +
                             std::to_string(k));
      }
      out.push_back({k, feasible_start(channels[k], earliest, guard), bytes});
      break;
    }
    case WavelengthPolicyKind::FF: {
      const auto k = first_fit_channel(channels, earliest, guard);
      out.push_back({k, feasible_start(channels[k], earliest, guard), bytes});
      break;
    }
  }
  return out;
}

}  // namespace ponsim
