#include "ponsim/dba.hpp"

#include <algorithm>
#include <cassert>

#include "ponsim/errors.hpp"

namespace ponsim {

std::string_view to_string(ExcessPolicy p) {
  switch (p) {
    case ExcessPolicy::DBA1: return "DBA1";
    case ExcessPolicy::DBA2: return "DBA2";
    case ExcessPolicy::DBA3: return "DBA3";
    case ExcessPolicy::WDBA: return "WDBA";
    case ExcessPolicy::WDBA1: return "WDBA1";
  }
  return "?";
}

std::optional<ExcessPolicy> parse_excess_policy(std::string_view s) {
  if (s == "DBA1") return ExcessPolicy::DBA1;
  if (s == "DBA2") return ExcessPolicy::DBA2;
  if (s == "DBA3") return ExcessPolicy::DBA3;
  if (s == "WDBA" || s == "WDBA2") return ExcessPolicy::WDBA;
  if (s == "WDBA1") return ExcessPolicy::WDBA1;
  return std::nullopt;
}

std::uint64_t limited_grant(std::uint64_t request, std::uint64_t wmax) {
  return std::min(request, wmax);
}

Classification classify(const DemandSet& demands) {
  Classification c;
  for (const auto& d : demands) {
    (d.request <= d.wmax ? c.under : c.over).insert(d.onu);
  }
  return c;
}

ExcessPool excess_pool(const DemandSet& demands, const std::set<std::uint32_t>& under) {
  ExcessPool pool;
  for (const auto& d : demands) {
    if (!under.contains(d.onu)) continue;
    pool.total_bytes += d.wmax - d.request;
    pool.contributors.push_back(d.onu);
  }
  return pool;
}

namespace {

using u128 = unsigned __int128;

std::optional<ExcessPolicy> g_fault;

std::uint64_t share(std::uint64_t pool, std::uint64_t num, std::uint64_t den) {
  return static_cast<std::uint64_t>(u128{pool} * num / den);
}

}  // namespace

GrantMap distribute_excess(ExcessPolicy policy, const DemandSet& demands,
                           const std::set<std::uint32_t>& over, const ExcessPool& pool) {
  GrantMap out;
  if (over.empty()) return out;

  std::uint64_t sum_r = 0;
  std::uint64_t sum_b = 0;
  for (const auto& d : demands) {
    if (!over.contains(d.onu)) continue;
    sum_r += d.request;
    sum_b += d.request - d.wmax;
  }
  assert(sum_r > 0 && sum_b > 0);

  const std::uint64_t e = pool.total_bytes;
  const std::uint64_t n = over.size() + (g_fault == policy ? 1 : 0);
  for (const auto& d : demands) {
    if (!over.contains(d.onu)) continue;
    std::uint64_t g = 0;
    switch (policy) {
      case ExcessPolicy::DBA1: g = d.wmax + share(e, d.request, sum_r); break;
      case ExcessPolicy::DBA2: g = d.wmax + e / n; break;
      case ExcessPolicy::DBA3: g = std::min(d.request, d.wmax + e / n); break;
      case ExcessPolicy::WDBA: g = d.wmax + share(e, d.request - d.wmax, sum_b); break;
      case ExcessPolicy::WDBA1:
        g = std::min(d.request, d.wmax + share(e, d.request - d.wmax, sum_b));
        break;
    }
    out[d.onu] = g;
  }
  return out;
}

namespace testing {
void inject_excess_fault(std::optional<ExcessPolicy> policy) { g_fault = policy; }
}  // namespace testing

bool GroupState::holds(std::uint32_t onu) const {
  return std::find(members.begin(), members.end(), onu) != members.end();
}

bool GroupState::complete() const {
  for (auto m : members) {
    const bool seen = std::any_of(buffered.begin(), buffered.end(),
                                  [m](const ReportMsg& r) { return r.onu == m; });
    if (!seen) return false;
  }
  return true;
}

GrantMap group_schedule(GroupState& group, const DemandSet& demands) {
  for (auto m : group.members) {
    const bool present = std::any_of(demands.begin(), demands.end(),
                                     [m](const Demand& d) { return d.onu == m; });
    if (!present) {
      throw IncompleteGroup("group " + std::to_string(group.id) + " is missing the report of onu " +
                            std::to_string(m));
    }
  }
  const auto cls = classify(demands);
  const auto pool = excess_pool(demands, cls.under);
  const auto extra = distribute_excess(group.policy, demands, cls.over, pool);

  GrantMap out;
  for (const auto& d : demands) {
    auto it = extra.find(d.onu);
    out[d.onu] = it != extra.end() ? it->second : limited_grant(d.request, d.wmax);
  }
  group.buffered.clear();
  return out;
}

}  // namespace ponsim
