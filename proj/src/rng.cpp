#include "ponsim/rng.hpp"

#include <cmath>

namespace ponsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t derive_stream_key(std::uint64_t master_seed, std::string_view name) {
  return mix64(mix64(master_seed + kGolden) ^ fnv1a64(name));
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return next_u64();  // full 64-bit range
  // Lemire's nearly-divisionless bounded draw.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * span;
  auto low = static_cast<std::uint64_t>(m);
  if (low < span) {
    const std::uint64_t threshold = -span % span;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * span;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return lo + static_cast<std::uint64_t>(m >> 64);
}

double RngStream::exponential(double mean) {
  return -mean * std::log1p(-uniform01());
}

double BoundedPareto::sample(RngStream& rng) const {
  // Inverse of F(x) = (1 - (lo/x)^a) / (1 - (lo/hi)^a).
  const double u = rng.uniform01();
  const double tail = 1.0 - std::pow(lo / hi, alpha);
  return lo * std::pow(1.0 - u * tail, -1.0 / alpha);
}

double BoundedPareto::mean() const {
  const double ratio = std::pow(lo / hi, alpha);
  if (std::abs(alpha - 1.0) < 1e-12) {
    return lo * std::log(hi / lo) / (1.0 - lo / hi);
  }
  return std::pow(lo, alpha) / (1.0 - ratio) * alpha / (alpha - 1.0) *
         (std::pow(lo, 1.0 - alpha) - std::pow(hi, 1.0 - alpha));
}

}  // namespace ponsim
