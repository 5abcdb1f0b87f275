#include <doctest.h>

#include <numeric>
#include <sstream>

#include "ponsim/errors.hpp"
#include "ponsim/metrics.hpp"

using namespace ponsim;

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const auto p = percentile_set(v);
  CHECK(p.at(10) == 10.0);
  CHECK(p.at(30) == 30.0);
  CHECK(p.at(50) == 50.0);
  CHECK(p.at(80) == 80.0);
  CHECK(p.at(100) == 100.0);
  CHECK_THROWS_AS(p.at(90), std::out_of_range);

  const std::vector<double> one{7.0};
  for (int q : kPercentiles) CHECK(percentile_set(one).at(q) == 7.0);
  const std::vector<double> same{5.0, 5.0, 5.0};
  for (int q : kPercentiles) CHECK(percentile_set(same).at(q) == 5.0);
  CHECK_THROWS_AS(percentile_set(std::vector<double>{}), EmptySamples);
}

TEST_CASE("collector mean and warmup") {
  DelayCollector c(1s, 0, RngStream("r", 1));
  c.record(500ms, 100ms);
  for (int ms : {1, 2, 3}) c.record(2s, SimTime{ms * 1'000'000});
  CHECK(c.count() == 3);
  CHECK(c.mean_seconds() == doctest::Approx(0.002).epsilon(1e-12));
  const auto s = summarize(TrafficClass::DC, c);
  REQUIRE(s.has_value());
  CHECK(s->percentiles.at(100) == doctest::Approx(0.003));
  CHECK(s->warmup_excluded == 1s);
  CHECK_FALSE(summarize(TrafficClass::DC, DelayCollector(SimTime{0}, 0, RngStream("r", 1))));
}

TEST_CASE("reservoir agrees with the full trace") {
  DelayCollector full(SimTime{0}, 0, RngStream("a", 3));
  DelayCollector res(SimTime{0}, 100'000, RngStream("b", 3));
  RngStream gen("g", derive_stream_key(11, "g"));
  for (int i = 0; i < 1'000'000; ++i) {
    const SimTime d{static_cast<std::int64_t>(gen.exponential(1e6))};
    full.record(SimTime{i}, d);
    res.record(SimTime{i}, d);
  }
  CHECK(res.samples().size() == 100'000);
  CHECK(full.mean_seconds() == res.mean_seconds());
  const double exact = std::accumulate(full.samples().begin(), full.samples().end(), 0.0) /
                       static_cast<double>(full.samples().size());
  CHECK(full.mean_seconds() == doctest::Approx(exact).epsilon(1e-12));
  const double sampled = std::accumulate(res.samples().begin(), res.samples().end(), 0.0) /
                         static_cast<double>(res.samples().size());
  CHECK(sampled == doctest::Approx(exact).epsilon(0.01));
  const auto pf = percentile_set(full.samples());
  const auto pr = percentile_set(res.samples());
  CHECK(pr.at(50) == doctest::Approx(pf.at(50)).epsilon(0.02));
  CHECK(pr.at(80) == doctest::Approx(pf.at(80)).epsilon(0.02));
}

TEST_CASE("replication confidence intervals") {
  const std::vector<double> same{3.0, 3.0, 3.0};
  CHECK(aggregate_replications(same).half_width == 0.0);
  const std::vector<double> two{10.0, 20.0};
  const auto s = aggregate_replications(two);
  CHECK(s.mean == 15.0);
  // t(0.975, 1) = 12.7062; sd = 7.0711; half width = t * sd / sqrt(2).
  CHECK(s.half_width == doctest::Approx(12.706204736 * 5.0).epsilon(1e-6));
  CHECK_THROWS_AS(aggregate_replications(std::vector<double>{1.0}), InsufficientReplications);
}

TEST_CASE("csv rows follow the fixed schema") {
  RunResult r;
  r.labels = {"default", "DWBA_FL", "DC_FIRST", "FF"};
  r.seed = 7;
  r.load = 0.8;
  DelayStats d;
  d.cls = TrafficClass::DC;
  d.count = 1;
  d.mean_s = 0.00025;
  d.percentiles.values = {1, 2, 3, 4, 5};
  r.delay[index_of(TrafficClass::DC)] = d;
  r.utilization = {0.5, 0.25};
  r.mean_cycle_s = 0.001;
  std::ostringstream os;
  write_csv_header(os);
  write_csv_rows(os, r);
  const std::string out = os.str();
  CHECK(out.rfind("scenario,seed,load,scheduler,policy,wavelength_policy,class,metric,value\n", 0) ==
        0);
  CHECK(out.find("default,7,0.8,DWBA_FL,DC_FIRST,FF,DC,mean_delay_s,0.00025\n") != std::string::npos);
  CHECK(out.find("DC,p80,4\n") != std::string::npos);
  CHECK(out.find("all,util_λ1,0.25\n") != std::string::npos);
  CHECK(out.find("all,mean_cycle_s,0.001\n") != std::string::npos);
  CHECK(out.find("involved_fraction") == std::string::npos);

  r.fl_rounds = 2;
  r.fl_round_delays_s = {1.0, 2.0};
  r.involved_fraction = 0.75;
  const auto rows = to_rows(r);
  CHECK(rows.back().metric == "involved_fraction");
  CHECK(rows[rows.size() - 2].value == 1.5);
}

TEST_CASE("replication summaries group by class and metric") {
  RunResult a;
  a.mean_cycle_s = 1.0;
  RunResult b = a;
  b.mean_cycle_s = 3.0;
  const std::vector<RunResult> runs{a, b};
  const auto rows = summarize_replications(runs);
  bool found = false;
  for (const auto& r : rows) {
    if (r.metric == "mean_cycle_s") {
      found = true;
      CHECK(r.summary.mean == 2.0);
      CHECK(r.summary.n == 2);
    }
  }
  CHECK(found);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-7) == "1e-07");
}
