#include <doctest.h>

#include "ponsim/dba.hpp"
#include "ponsim/errors.hpp"
#include "ponsim/selftest.hpp"
#include "../common/dba_oracle.hpp"

using namespace ponsim;

using ponsim::testing::kAllPolicies;

TEST_CASE("policy names") {
  for (auto p : kAllPolicies) CHECK(parse_excess_policy(to_string(p)) == p);
  CHECK(parse_excess_policy("WDBA2") == ExcessPolicy::WDBA);
  CHECK_FALSE(parse_excess_policy("DBA4").has_value());
}

TEST_CASE("limited grant") {
  CHECK(limited_grant(1000, 5000) == 1000);
  CHECK(limited_grant(8000, 5000) == 5000);
  CHECK(limited_grant(0, 5000) == 0);
}

TEST_CASE("classification") {
  const DemandSet d{{0, 3000, 5000}, {1, 4500, 5000}, {2, 12000, 5000}, {3, 8000, 5000}};
  const auto c = classify(d);
  CHECK(c.under == std::set<std::uint32_t>{0, 1});
  CHECK(c.over == std::set<std::uint32_t>{2, 3});
  const auto b = classify({{0, 5000, 5000}, {1, 5000, 5000}});
  CHECK(b.under.size() == 2);
  CHECK(b.over.empty());
  const auto e = classify({});
  CHECK(e.under.empty());
  CHECK(e.over.empty());
}

TEST_CASE("excess pool") {
  const DemandSet d{{0, 3000, 5000}, {1, 4500, 5000}, {2, 12000, 5000}};
  CHECK(excess_pool(d, {0, 1}).total_bytes == 2500);
  CHECK(excess_pool(d, {}).total_bytes == 0);
  const DemandSet idle{{0, 0, 5000}, {1, 0, 5000}, {2, 0, 5000}, {3, 0, 5000}};
  CHECK(excess_pool(idle, classify(idle).under).total_bytes == 20000);
}

TEST_CASE("excess distribution worked examples") {
  const DemandSet d{{0, 12000, 5000}, {1, 8000, 5000}};
  const std::set<std::uint32_t> over{0, 1};
  const ExcessPool pool{4000, {}};
  CHECK(distribute_excess(ExcessPolicy::DBA1, d, over, pool) == GrantMap{{0, 7400}, {1, 6600}});
  CHECK(distribute_excess(ExcessPolicy::DBA2, d, over, pool) == GrantMap{{0, 7000}, {1, 7000}});
  CHECK(distribute_excess(ExcessPolicy::WDBA, d, over, pool) == GrantMap{{0, 7800}, {1, 6200}});
  CHECK(distribute_excess(ExcessPolicy::WDBA1, d, over, pool) == GrantMap{{0, 7800}, {1, 6200}});

  const DemandSet d2{{0, 12000, 5000}, {1, 6000, 5000}};
  CHECK(distribute_excess(ExcessPolicy::DBA3, d2, over, pool) == GrantMap{{0, 7000}, {1, 6000}});
  // B = {7000, 1000}: 5000 + 4000*7000/8000 and 5000 + 4000*1000/8000.
  CHECK(distribute_excess(ExcessPolicy::WDBA1, d2, over, pool) == GrantMap{{0, 8500}, {1, 5500}});
}

TEST_CASE("controlled policies clamp when the pool exceeds the overload") {
  const DemandSet d{{0, 6000, 5000}, {1, 5500, 5000}};
  const ExcessPool pool{4000, {}};
  CHECK(distribute_excess(ExcessPolicy::WDBA1, d, {0, 1}, pool) == GrantMap{{0, 6000}, {1, 5500}});
  CHECK(distribute_excess(ExcessPolicy::DBA3, d, {0, 1}, pool) == GrantMap{{0, 6000}, {1, 5500}});
  CHECK(distribute_excess(ExcessPolicy::WDBA, d, {0, 1}, pool) == GrantMap{{0, 7666}, {1, 6333}});
}

TEST_CASE("empty overloaded set leaves the pool unused") {
  const DemandSet d{{0, 100, 5000}};
  CHECK(distribute_excess(ExcessPolicy::DBA2, d, {}, ExcessPool{4900, {0}}).empty());
}

TEST_CASE("group schedule") {
  GroupState g{0, {0, 1}, ExcessPolicy::DBA2, {}};
  g.buffered.push_back({0, SimTime{0}, {}});
  CHECK(group_schedule(g, {{0, 2000, 5000}, {1, 9000, 5000}}) == GrantMap{{0, 2000}, {1, 8000}});
  CHECK(g.buffered.empty());
  CHECK(group_schedule(g, {{0, 2000, 5000}, {1, 3000, 5000}}) == GrantMap{{0, 2000}, {1, 3000}});
  CHECK(group_schedule(g, {{0, 5000, 5000}, {1, 5000, 5000}}) == GrantMap{{0, 5000}, {1, 5000}});
  CHECK_THROWS_AS(group_schedule(g, {{0, 1, 5000}}), IncompleteGroup);
}

TEST_CASE("group completeness") {
  GroupState g{3, {2, 5}, ExcessPolicy::DBA1, {}};
  CHECK(g.holds(5));
  CHECK_FALSE(g.holds(1));
  CHECK_FALSE(g.complete());
  g.buffered.push_back({2, SimTime{0}, {}});
  CHECK_FALSE(g.complete());
  g.buffered.push_back({5, SimTime{0}, {}});
  CHECK(g.complete());
}

TEST_CASE("random demand sets: control, floor, conservation, proportionality") {
  const auto c = testing::random_property_sweep(2024, 10'000);
  CHECK(c.sets == 10'000);
  CHECK(c.control == 0);
  CHECK(c.floor == 0);
  CHECK(c.conservation == 0);
  CHECK(c.proportion == 0);
}

TEST_CASE("brute-force oracle on small instances") {
  CHECK(testing::small_instance_mismatches(77, 100'000) == 0);
}

TEST_CASE("selftest passes and names an injected fault") {
  for (const auto& c : run_selftest()) CHECK_MESSAGE(c.passed, c.name);
  std::vector<std::string> failed;
  for (const auto& c : run_selftest(std::string("dba2"))) {
    if (!c.passed) failed.push_back(c.name);
  }
  testing::inject_excess_fault(std::nullopt);
  CHECK(failed == std::vector<std::string>{"dba2_equal_split", "group_legacy_plus_new"});
}
