#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ponsim/time.hpp"

namespace ponsim {

struct ChannelState {
  std::uint32_t wavelength = 0;
  std::uint64_t line_rate_bps = 25'000'000'000ull;
  /// End of the last scheduled burst; the guard comes after it.
  SimTime next_free{0};
};

enum class WavelengthPolicyKind : std::uint8_t { SSD, MSD, FF };

std::string_view to_string(WavelengthPolicyKind k);
std::optional<WavelengthPolicyKind> parse_wavelength_policy(std::string_view s);

struct WavelengthPolicy {
  WavelengthPolicyKind kind = WavelengthPolicyKind::FF;
  /// Fixed channel per ONU (MSD). Empty means onu mod n_wavelengths.
  std::vector<std::uint32_t> msd_map;

  std::uint32_t msd_channel(std::uint32_t onu, std::size_t n_channels) const;
};

/// max(earliest, next_free + guard)
SimTime feasible_start(const ChannelState& ch, SimTime earliest, SimTime guard);

/// Index of the channel with the smallest feasible start; ties go to the
/// lowest index.
std::uint32_t first_fit_channel(std::span<const ChannelState> channels, SimTime earliest,
                                SimTime guard);

/// Even split of `bytes` over `n` parts; the first bytes % n parts get one
/// extra byte.
std::vector<std::uint64_t> split_even(std::uint64_t bytes, std::size_t n);

struct ChannelPortion {
  std::uint32_t wavelength = 0;
  SimTime start{};
  std::uint64_t bytes = 0;
};

/// Channel placement of one burst of `bytes` (> 0). SSD spreads it over every
/// channel, each share raised to at least min(bytes, min_share) so a share
/// can always carry the largest frame; MSD uses the fixed channel; FF the
/// first-fit channel. Nothing is committed to `channels`.
/// Throws NoChannelError on an empty channel list.
std::vector<ChannelPortion> assign(const WavelengthPolicy& policy, std::uint32_t onu,
                                   std::uint64_t bytes, SimTime earliest,
                                   std::span<const ChannelState> channels, SimTime guard,
                                   std::uint64_t min_share = 0);

}  // namespace ponsim
