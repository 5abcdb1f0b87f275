#include <doctest.h>

#include <sstream>

#include "ponsim/errors.hpp"
#include "ponsim/sched.hpp"

using namespace ponsim;

namespace {

constexpr std::uint64_t kRate = 25'000'000'000ull;

Olt make_olt(SchedulerConfig cfg, std::uint32_t n, std::uint64_t wmax, SimTime rtt = 150us) {
  std::vector<ChannelState> ch{{0, kRate, SimTime{0}}, {1, kRate, SimTime{0}}};
  std::vector<SlaProfile> slas(n, SlaProfile{0.0, wmax, std::nullopt});
  return Olt(std::move(cfg), std::move(ch), std::move(slas), std::vector<SimTime>(n, rtt));
}

ReportMsg report(std::uint32_t onu, std::uint64_t fl, std::uint64_t dc, std::uint64_t ds,
                 std::uint64_t be) {
  ReportMsg r;
  r.onu = onu;
  r.queue_bytes = {fl, dc, ds, be};
  return r;
}

Frame wire(TrafficClass c, std::uint32_t bytes) {
  Frame f;
  f.cls = c;
  f.payload_bytes = static_cast<std::uint16_t>(bytes - kDefaultOverhead);
  if (c == TrafficClass::FL) f.fl_round = 0;
  return f;
}

}  // namespace

TEST_CASE("scheduler names") {
  for (auto k : {SchedulerKind::IpactLimited, SchedulerKind::MwBs, SchedulerKind::DwbaFl,
                 SchedulerKind::Fcfs}) {
    CHECK(parse_scheduler_kind(to_string(k)) == k);
  }
  CHECK(parse_priority_policy("FL_FIRST") == PriorityPolicy::FlFirst);
  CHECK(parse_priority_policy("DC_FIRST") == PriorityPolicy::DcFirst);
}

TEST_CASE("service orders") {
  SchedulerConfig c;
  c.kind = SchedulerKind::DwbaFl;
  c.priority = PriorityPolicy::FlFirst;
  CHECK(service_order(c) == kFlFirstOrder);
  c.priority = PriorityPolicy::DcFirst;
  CHECK(service_order(c) == kDcFirstOrder);
  c.kind = SchedulerKind::IpactLimited;
  CHECK(service_order(c) == kIpactOrder);
  c.kind = SchedulerKind::Fcfs;
  CHECK(queue_discipline(c) == QueueDiscipline::Fifo);
}

TEST_CASE("slice of 15 us at 25 Gb/s") {
  CHECK(slice_bytes_per_cycle(0.015, 1ms, kRate) == 46'875);
}

TEST_CASE("config validation") {
  SchedulerConfig c;
  c.theta = 0.0;
  CHECK_THROWS_AS(c.validate(kRate), ValidationError);
  c.theta = 1e-6;
  c.kind = SchedulerKind::MwBs;
  CHECK_THROWS_AS(c.validate(kRate), ValidationError);
  c.theta = 0.015;
  CHECK_NOTHROW(c.validate(kRate));
}

TEST_CASE("a full FL round drains through the slice in 571 cycles") {
  SliceState s(46'875);
  int cycles = 0;
  std::uint64_t total = 0;
  while (true) {
    const auto g = s.on_report(0, 26'752'000 - total);
    if (g == 0) break;
    total += g;
    ++cycles;
    if (!s.reserved_for()) break;
  }
  CHECK(cycles == 571);
  CHECK(total == 26'752'000);
  CHECK(s.reservations_completed() == 1);
  CHECK(s.conservation_violations() == 0);
}

TEST_CASE("slice is exclusive while reserved") {
  SliceState s(46'875);
  CHECK(s.on_report(0, 100'000) == 46'875);
  CHECK(s.on_report(1, 5'000) == 0);
  CHECK(s.reserved_for() == 0u);
  CHECK(s.on_report(0, 53'125) == 46'875);
  CHECK(s.on_report(1, 5'000) == 0);
  CHECK(s.on_report(0, 6'250) == 6'250);
  CHECK_FALSE(s.reserved_for().has_value());
  CHECK(s.on_report(1, 5'000) == 5'000);
  CHECK(s.exclusivity_violations() == 0);
  CHECK(s.conservation_violations() == 0);
}

TEST_CASE("reservation keeps its initial demand") {
  SliceState s(1'000);
  CHECK(s.on_report(0, 2'500) == 1'000);
  // More FL arrived meanwhile; the open reservation still ends at 2500.
  CHECK(s.on_report(0, 9'000) == 1'000);
  CHECK(s.on_report(0, 9'000) == 500);
  CHECK_FALSE(s.reserved_for().has_value());
  CHECK(s.on_report(0, 8'500) == 1'000);
  CHECK(s.reservations_started() == 2);
}

TEST_CASE("ipact sizes by the limited rule") {
  CHECK(size_ipact(report(0, 0, 500, 1500, 0), 46'875).conventional_bytes == 2000);
  CHECK(size_ipact(report(0, 0, 0, 1'000'000, 0), 46'875).conventional_bytes == 46'875);
  CHECK(size_ipact(report(0, 0, 0, 0, 0), 46'875).conventional_bytes == 0);
}

TEST_CASE("mw-bs sizes slice and conventional parts separately") {
  SliceState slice(46'875);
  const auto s = size_mwbs(report(0, 100'000, 180, 2000, 0), 30'000, slice);
  CHECK(s.fl_bytes == 46'875);
  CHECK(s.conventional_bytes == 2180);
  SliceState held(46'875);
  held.on_report(5, 1'000'000);
  const auto t = size_mwbs(report(0, 100'000, 180, 50'000, 0), 30'000, held);
  CHECK(t.fl_bytes == 0);
  CHECK(t.conventional_bytes == 30'000);
}

TEST_CASE("dwba-fl DC-first sends DC then FL in a 30 kB window") {
  OnuQueues q;
  for (int i = 0; i < 26; ++i) q.enqueue(wire(TrafficClass::FL, 1520));  // 39,520 B
  q.enqueue(wire(TrafficClass::DC, 90));
  q.enqueue(wire(TrafficClass::DC, 90));
  const auto r = build_report(0, q, SimTime{0});
  const auto g = size_dwbafl(r, 30'000);
  CHECK(g.conventional_bytes == 30'000);
  const auto out = q.dequeue_for_window(g.conventional_bytes, kDcFirstOrder);
  std::uint64_t dc = 0;
  std::uint64_t fl = 0;
  for (const auto& f : out) (f.cls == TrafficClass::DC ? dc : fl) += f.wire_bytes();
  CHECK(dc == 180);
  CHECK(fl == 19 * 1520);
  CHECK(out.front().cls == TrafficClass::DC);
}

TEST_CASE("dwba-fl FL-first fills a window with FL and DC waits") {
  OnuQueues q;
  for (int i = 0; i < 26; ++i) q.enqueue(wire(TrafficClass::FL, 1520));
  q.enqueue(wire(TrafficClass::DC, 90));
  q.enqueue(wire(TrafficClass::DC, 90));
  const auto out = q.dequeue_for_window(20 * 1520, kFlFirstOrder);
  CHECK(out.size() == 20);
  for (const auto& f : out) CHECK(f.cls == TrafficClass::FL);
  CHECK(q.bytes(TrafficClass::DC) == 180);
}

TEST_CASE("fcfs serves in arrival order") {
  OnuQueues q(QueueDiscipline::Fifo);
  auto be = wire(TrafficClass::BE, 500);
  be.arrival = 1us;
  auto dc = wire(TrafficClass::DC, 90);
  dc.arrival = 2us;
  q.enqueue(be);
  q.enqueue(dc);
  const auto g = size_fcfs(build_report(0, q, 3us), 100'000);
  const auto out = q.dequeue_for_window(g.conventional_bytes, kDcFirstOrder);
  REQUIRE(out.size() == 2);
  CHECK(out[0].cls == TrafficClass::BE);
  CHECK(size_fcfs(report(0, 0, 0, 0, 0), 100).conventional_bytes == 0);
}

TEST_CASE("olt grants respect causality, guard and the report slot") {
  SchedulerConfig cfg;
  cfg.kind = SchedulerKind::IpactLimited;
  auto olt = make_olt(cfg, 3, 46'875);
  const auto g0 = olt.on_report(report(0, 0, 0, 2000, 0), 1ms);
  REQUIRE(g0.size() == 1);
  REQUIRE(g0[0].grants.size() == 1);
  const auto& a = g0[0].grants[0];
  CHECK(a.wavelength == 0);
  CHECK(a.start == 1ms + 150us);
  CHECK(a.data_bytes == 2000);
  CHECK(a.carries_report);
  CHECK(a.duration == airtime(2064, kRate));

  const auto g1 = olt.on_report(report(1, 0, 0, 1'000'000, 0), 1ms);
  const auto& b = g1[0].grants[0];
  CHECK(b.wavelength == 1);
  CHECK(b.data_bytes == 46'875);

  const auto g2 = olt.on_report(report(2, 0, 0, 0, 0), 1ms);
  const auto& c = g2[0].grants[0];
  CHECK(c.wavelength == 0);
  CHECK(c.start == a.end() + 624ns);
  CHECK(c.data_bytes == 0);
  CHECK(c.duration == airtime(kReportBytes, kRate));
  CHECK(olt.violations().total() == 0);
}

TEST_CASE("olt mw-bs gate puts the slice and the conventional window back to back") {
  SchedulerConfig cfg;
  cfg.kind = SchedulerKind::MwBs;
  auto olt = make_olt(cfg, 2, 195'312);
  CHECK(olt.wmax(0) == 195'312 - 23'438);
  const auto g = olt.on_report(report(0, 1'000'000, 180, 5000, 0), SimTime{0});
  REQUIRE(g.size() == 1);
  REQUIRE(g[0].grants.size() == 2);
  const auto& fl = g[0].grants[0];
  const auto& conv = g[0].grants[1];
  CHECK(fl.purpose == GrantPurpose::FlSlice);
  CHECK(fl.data_bytes == 46'875);
  CHECK(conv.purpose == GrantPurpose::Conventional);
  CHECK(conv.wavelength == fl.wavelength);
  CHECK(conv.start == fl.end());
  CHECK(conv.carries_report);
  const auto bins = olt.bins_for(g[0]);
  CHECK(bins[0].accepts == mask_of(TrafficClass::FL));
  CHECK((bins[1].accepts & mask_of(TrafficClass::FL)) == 0);

  // Another ONU with FL backlog gets only its conventional part.
  const auto h = olt.on_report(report(1, 500'000, 0, 1000, 0), SimTime{0});
  REQUIRE(h[0].grants.size() == 1);
  CHECK(h[0].grants[0].purpose == GrantPurpose::Conventional);
  CHECK(olt.violations().total() == 0);
}

TEST_CASE("olt logs one line per grant") {
  SchedulerConfig cfg;
  auto olt = make_olt(cfg, 1, 10'000);
  std::ostringstream log;
  olt.set_gate_log(&log);
  olt.on_report(report(0, 0, 100, 0, 0), 5us);
  CHECK(log.str() == "5000,0,conventional,0,155000,53\n");
}

TEST_CASE("olt sla groups release gates only when complete") {
  SchedulerConfig cfg;
  cfg.kind = SchedulerKind::IpactLimited;
  std::vector<ChannelState> ch{{0, kRate, SimTime{0}}};
  std::vector<SlaProfile> slas(3, SlaProfile{0.0, 5000, std::nullopt});
  std::vector<GroupState> groups{{0, {0, 1}, ExcessPolicy::DBA2, {}}};
  Olt olt(cfg, ch, slas, std::vector<SimTime>(3, 100us), groups);
  CHECK(olt.on_report(report(0, 0, 0, 2000, 0), SimTime{0}).empty());
  CHECK(olt.on_report(report(2, 0, 0, 9000, 0), SimTime{0}).size() == 1);
  const auto g = olt.on_report(report(1, 0, 0, 9000, 0), 10us);
  REQUIRE(g.size() == 2);
  CHECK(g[0].onu == 0);
  CHECK(g[0].data_bytes() == 2000);
  CHECK(g[1].onu == 1);
  CHECK(g[1].data_bytes() == 8000);
  CHECK(g[1].burst_start() >= g[0].burst_end() + 624ns);
  CHECK(olt.violations().total() == 0);
}

TEST_CASE("olt commits each burst to the channel timeline") {
  SchedulerConfig cfg;
  std::vector<ChannelState> ch{{0, kRate, SimTime{0}}};
  std::vector<SlaProfile> slas(1, SlaProfile{0.0, 5000, std::nullopt});
  Olt olt(cfg, ch, slas, {100us});
  olt.on_report(report(0, 0, 0, 1000, 0), SimTime{0});
  CHECK(olt.violations().total() == 0);
  CHECK(olt.channels()[0].next_free > 100us);
}
