#include "ponsim/selftest.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ponsim/analytics.hpp"
#include "ponsim/config.hpp"
#include "ponsim/dba.hpp"
#include "ponsim/errors.hpp"
#include "ponsim/metrics.hpp"
#include "ponsim/sched.hpp"
#include "ponsim/traffic.hpp"

namespace ponsim {

namespace {

std::string show(const GrantMap& m) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [k, v] : m) {
    os << (first ? "" : ", ") << k << ':' << v;
    first = false;
  }
  os << '}';
  return os.str();
}

SelftestCheck grant_check(const std::string& name, ExcessPolicy p, const DemandSet& d,
                          std::uint64_t pool, const GrantMap& want) {
  const auto cls = classify(d);
  const auto got = distribute_excess(p, d, cls.over, ExcessPool{pool, {}});
  return {name, got == want, "got " + show(got) + ", want " + show(want)};
}

SelftestCheck near(const std::string& name, double got, double want, double tol) {
  std::ostringstream os;
  os << std::setprecision(10) << "got " << got << ", want " << want;
  return {name, std::abs(got - want) <= tol, os.str()};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const std::optional<std::string>& inject_fault) {
  if (inject_fault) {
    if (*inject_fault == "dba2") {
      testing::inject_excess_fault(ExcessPolicy::DBA2);
    } else if (*inject_fault == "dba3") {
      testing::inject_excess_fault(ExcessPolicy::DBA3);
    } else {
      throw ConfigError("unknown fault '" + *inject_fault + "'");
    }
  }

  std::vector<SelftestCheck> out;
  const DemandSet base{{0, 12000, 5000}, {1, 8000, 5000}};
  const DemandSet clamp{{0, 12000, 5000}, {1, 6000, 5000}};
  out.push_back(grant_check("dba1_proportional", ExcessPolicy::DBA1, base, 4000,
                            {{0, 7400}, {1, 6600}}));
  out.push_back(
      grant_check("dba2_equal_split", ExcessPolicy::DBA2, base, 4000, {{0, 7000}, {1, 7000}}));
  out.push_back(
      grant_check("dba3_clamped_split", ExcessPolicy::DBA3, clamp, 4000, {{0, 7000}, {1, 6000}}));
  out.push_back(grant_check("wdba_excess_weighted", ExcessPolicy::WDBA, base, 4000,
                            {{0, 7800}, {1, 6200}}));
  out.push_back(grant_check("wdba1_clamped_weighted", ExcessPolicy::WDBA1, clamp, 4000,
                            {{0, 8500}, {1, 5500}}));
  {
    GroupState g{0, {0, 1}, ExcessPolicy::DBA2, {}};
    const auto got = group_schedule(g, {{0, 2000, 5000}, {1, 9000, 5000}});
    const GrantMap want{{0, 2000}, {1, 8000}};
    out.push_back({"group_legacy_plus_new", got == want, "got " + show(got)});
  }
  out.push_back(near("ipact_waste_10_percent", ipact_waste_percent(1ms, 100us), 10.0, 0.0));
  out.push_back(near("ipact_waste_20_percent", ipact_waste_percent(1ms, 200us), 20.0, 0.0));
  out.push_back(near("wmax_30_25_us",
                     static_cast<double>(wmax_per_onu(1ms, 32, 1us).count()) / 1e3, 30.25, 0.0));
  {
    WasteInputs in;
    in.cycle = 1ms;
    in.rtt = 200us;
    in.n_onus = 32;
    in.n_group = 28;
    in.guard = 1us;
    in.wlength_percent = 100.0;
    out.push_back(near("gsipact_waste_percent", gsipact_waste(in).percent, 7.5, 1e-9));
  }
  {
    const auto frames = cbr_arrivals(CbrSpec{}, 1s);
    double bits = 0.0;
    for (const auto& f : frames) bits += 8.0 * f.payload_bytes;
    out.push_back(near("cbr_rate_44_8_mbps", bits, 44.8e6, 0.0));
  }
  out.push_back(near("slice_bytes_per_cycle",
                     static_cast<double>(slice_bytes_per_cycle(0.015, 1ms, 25'000'000'000ull)),
                     46875.0, 0.0));
  {
    std::vector<double> s;
    for (int i = 1; i <= 100; ++i) s.push_back(i);
    const auto p = percentile_set(s);
    out.push_back({"percentile_nearest_rank",
                   p.at(10) == 10 && p.at(50) == 50 && p.at(100) == 100, ""});
  }
  {
    const auto cfg = default_config();
    bool ok = true;
    try {
      cfg.validate();
    } catch (const std::exception&) {
      ok = false;
    }
    out.push_back({"default_config_valid", ok, ""});
  }

  testing::inject_excess_fault(std::nullopt);
  return out;
}

int report_selftest(std::ostream& os, const std::vector<SelftestCheck>& checks) {
  int failures = 0;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed && !c.detail.empty()) os << "  (" << c.detail << ')';
    os << '\n';
    if (!c.passed) ++failures;
  }
  os << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
     << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace ponsim
