#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ponsim/errors.hpp"
#include "ponsim/parallel.hpp"
#include "ponsim/traffic.hpp"

using namespace ponsim;

namespace {

double payload_rate_bps(std::span<const Frame> frames, SimTime horizon) {
  double bytes = 0.0;
  for (const auto& f : frames) bytes += f.payload_bytes;
  return bytes * 8.0 / to_seconds(horizon);
}

}  // namespace

TEST_CASE("traffic classes round-trip through their names") {
  for (auto c : kAllClasses) CHECK(parse_traffic_class(to_string(c)) == c);
  CHECK_FALSE(parse_traffic_class("XX").has_value());
}

TEST_CASE("cbr 70 B every 12.5 us over 1 s") {
  const CbrSpec spec;
  const auto frames = cbr_arrivals(spec, 1s);
  CHECK(frames.size() == 80'000);
  CHECK(payload_rate_bps(frames, 1s) == doctest::Approx(44.8e6).epsilon(1e-12));
  CHECK(spec.rate_bps() == doctest::Approx(44.8e6));
}

TEST_CASE("cbr corner cases") {
  CHECK(cbr_arrivals(CbrSpec{}, 12'499ns).empty());
  const CbrSpec s{100, 10us, kDefaultOverhead};
  CHECK(payload_rate_bps(cbr_arrivals(s, 1s), 1s) == doctest::Approx(80e6));
  CHECK_THROWS_AS((CbrSpec{0, 1us, 20}).validate(), ConfigError);
}

TEST_CASE("cbr is exactly periodic from k = 1") {
  const auto frames = cbr_arrivals(CbrSpec{}, 10ms);
  REQUIRE(frames.size() == 800);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    CHECK(frames[k].arrival == SimTime{12'500} * static_cast<std::int64_t>(k + 1));
    CHECK(frames[k].cls == TrafficClass::DC);
    CHECK(frame_is_valid(frames[k]));
  }
}

TEST_CASE("pareto shape follows the Hurst parameter") {
  ParetoOnOffSpec s;
  CHECK(s.shape_on() == doctest::Approx(1.4));
  s.hurst = 0.7;
  CHECK(s.shape_on() == doctest::Approx(1.6));
}

TEST_CASE("pareto rejects inverted burst bounds") {
  ParetoOnOffSpec s;
  s.burst_min = 2000;
  s.burst_max = 2000;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  RngStream r("x", 1);
  CHECK_THROWS_AS(ParetoOnOffSource(s, r, 0, TrafficClass::BE), ConfigError);
}

TEST_CASE("pareto with zero rate emits nothing") {
  ParetoOnOffSpec s;
  RngStream r("x", 1);
  CHECK(pareto_onoff_arrivals(s, r, 10s).empty());
}

TEST_CASE("pareto derived quantities are consistent") {
  ParetoOnOffSpec s;
  s.target_rate_bps = 100e6;
  const auto k = s.substreams();
  CHECK(k >= 1);
  CHECK(s.effective_duty() <= s.duty);
  CHECK(s.effective_duty() > 0.0);
  CHECK(k * s.on_rate_bps() * s.effective_duty() == doctest::Approx(100e6));
  const double on = to_seconds(s.mean_on);
  const double off = to_seconds(s.mean_off());
  CHECK(on / (on + off) == doctest::Approx(s.effective_duty()).epsilon(1e-6));
}

TEST_CASE("pareto frames are valid and time ordered") {
  ParetoOnOffSpec s;
  s.target_rate_bps = 300e6;
  RngStream r("p", derive_stream_key(3, "p"));
  const auto frames = pareto_onoff_arrivals(s, r, 2s, 5, TrafficClass::DS);
  REQUIRE(!frames.empty());
  bool ok = true;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    ok = ok && frame_is_valid(frames[i]) && frames[i].onu == 5 && frames[i].cls == TrafficClass::DS;
    if (i > 0) ok = ok && frames[i - 1].arrival <= frames[i].arrival;
  }
  CHECK(ok);
}

TEST_CASE("pareto 100 Mb/s over 60 s stays within 2% of 750 MB") {
  ParetoOnOffSpec s;
  s.target_rate_bps = 100e6;
  RngStream r("onu0/ds", derive_stream_key(1, "onu0/ds"));
  const auto frames = pareto_onoff_arrivals(s, r, 60s);
  double bytes = 0.0;
  for (const auto& f : frames) bytes += f.payload_bytes;
  CHECK(bytes == doctest::Approx(750e6).epsilon(0.02));
}

TEST_CASE("pareto DS+BE aggregate has Hurst parameter near 0.8") {
  ParetoOnOffSpec s;
  s.target_rate_bps = 100e6;
  RngStream a("onu0/ds", derive_stream_key(1, "onu0/ds"));
  RngStream b("onu0/be", derive_stream_key(1, "onu0/be"));
  ParetoOnOffSource ds(s, a, 0, TrafficClass::DS);
  ParetoOnOffSource be(s, b, 0, TrafficClass::BE);
  const SimTime horizon = 300s;
  const SimTime bin = 10ms;
  std::vector<double> series(static_cast<std::size_t>(horizon / bin), 0.0);
  std::size_t n = 0;
  for (auto* src : {&ds, &be}) {
    while (src->peek() < horizon) {
      const Frame f = src->pop();
      series[static_cast<std::size_t>(f.arrival / bin)] += f.wire_bytes();
      ++n;
    }
  }
  CHECK(n >= 1'000'000);
  const double h = variance_time_hurst_serial(series);
  CHECK(h >= 0.75);
  CHECK(h <= 0.85);
}

TEST_CASE("fl round of 26.4 MB is 17,600 full frames") {
  const FlWorkloadSpec spec;
  const auto frames = fl_round_frames(spec, 3, 7, 1s);
  REQUIRE(frames.size() == 17'600);
  bool ok = true;
  for (const auto& f : frames) {
    ok = ok && f.payload_bytes == 1500 && f.arrival == 1s && f.fl_round == 7u && f.onu == 3 &&
         f.cls == TrafficClass::FL && frame_is_valid(f);
  }
  CHECK(ok);
}

TEST_CASE("fl remainder is padded to the minimum payload") {
  FlWorkloadSpec spec;
  spec.payload_bytes_per_round = 1501;
  const auto frames = fl_round_frames(spec, 0, 0, SimTime{0});
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].payload_bytes == 1500);
  CHECK(frames[1].payload_bytes == 64);
  spec.payload_bytes_per_round = 0;
  CHECK(fl_round_frames(spec, 0, 0, SimTime{0}).empty());
}

TEST_CASE("frame trace has one line per frame") {
  const auto frames = cbr_arrivals(CbrSpec{}, 50us, 2);
  std::ostringstream os;
  write_frame_trace(os, frames);
  CHECK(os.str() == "12500 2 DC 90\n25000 2 DC 90\n37500 2 DC 90\n50000 2 DC 90\n");
}
