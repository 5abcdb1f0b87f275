#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ponsim {

/// FNV-1a over the bytes of `text`; stable across platforms.
std::uint64_t fnv1a64(std::string_view text);

/// Key for a named stream: a mix of the master seed and the name hash.
std::uint64_t derive_stream_key(std::uint64_t master_seed, std::string_view name);

/// Counter-based random stream. Draw k is a pure function of (key, k), so two
/// streams with the same (master seed, name) replay identically anywhere, and
/// streams with different names share no state.
///
/// Distribution transforms are implemented here rather than through <random>
/// distributions, whose output is not specified across standard libraries.
class RngStream {
 public:
  RngStream(std::string name, std::uint64_t key) : name_(std::move(name)), key_(key) {}

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer on the closed range [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double exponential(double mean);

  const std::string& name() const { return name_; }
  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::string name_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Pareto with shape `alpha` truncated to [lo, hi]; sampled by inverse CDF.
struct BoundedPareto {
  double alpha;
  double lo;
  double hi;

  double sample(RngStream& rng) const;
  double mean() const;
};

}  // namespace ponsim
