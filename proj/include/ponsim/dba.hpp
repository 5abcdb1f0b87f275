#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "ponsim/pon.hpp"

namespace ponsim {

struct Demand {
  std::uint32_t onu = 0;
  std::uint64_t request = 0;
  std::uint64_t wmax = 0;
};

using DemandSet = std::vector<Demand>;
using GrantMap = std::map<std::uint32_t, std::uint64_t>;

enum class ExcessPolicy : std::uint8_t { DBA1, DBA2, DBA3, WDBA, WDBA1 };

std::string_view to_string(ExcessPolicy p);
/// Accepts the five names plus "WDBA2", which is treated as WDBA.
std::optional<ExcessPolicy> parse_excess_policy(std::string_view s);

std::uint64_t limited_grant(std::uint64_t request, std::uint64_t wmax);

struct Classification {
  std::set<std::uint32_t> under;
  std::set<std::uint32_t> over;
};

/// Underloaded iff R_i <= W_max,i.
Classification classify(const DemandSet& demands);

struct ExcessPool {
  std::uint64_t total_bytes = 0;
  std::vector<std::uint32_t> contributors;
};

ExcessPool excess_pool(const DemandSet& demands, const std::set<std::uint32_t>& under);

/// Grants for the overloaded members only, floored to whole bytes.
/// DBA1:  W + E*R/sum(R)            DBA2:  W + E/|over|
/// DBA3:  min(R, W + E/|over|)      WDBA:  W + E*B/sum(B), B = R - W
/// WDBA1: min(R, WDBA)
/// Clamped leftovers are not redistributed. An empty `over` yields an empty
/// map and the pool goes unused.
GrantMap distribute_excess(ExcessPolicy policy, const DemandSet& demands,
                           const std::set<std::uint32_t>& over, const ExcessPool& pool);

/// SLA group waiting for all member reports before sizing their gates.
struct GroupState {
  std::uint32_t id = 0;
  std::vector<std::uint32_t> members;
  ExcessPolicy policy = ExcessPolicy::DBA2;
  /// Buffered reports in arrival order.
  std::vector<ReportMsg> buffered;

  bool complete() const;
  bool holds(std::uint32_t onu) const;
};

/// legacy_i = min(R_i, W_i); over members add their distribute_excess share
/// above W_i. Clears the buffer. Throws IncompleteGroup if a member report is
/// missing from `demands`.
GrantMap group_schedule(GroupState& group, const DemandSet& demands);

namespace testing {
/// Mutation hook for the self-test: DBA2 or DBA3 splits its pool over one
/// member too many. Not thread-safe; cleared with std::nullopt.
void inject_excess_fault(std::optional<ExcessPolicy> policy);
}  // namespace testing

}  // namespace ponsim
