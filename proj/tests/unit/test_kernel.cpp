#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ponsim/engine.hpp"
#include "ponsim/errors.hpp"
#include "ponsim/rng.hpp"

using namespace ponsim;

TEST_CASE("engine fires a single event at its time") {
  Engine e(1);
  SimTime seen{-1};
  e.set_handler([&](const Event& ev) { seen = ev.fire_at; });
  e.schedule(SimTime{10}, EventKind::StatsFlush);
  CHECK(e.run_until(SimTime{100}) == 1);
  CHECK(seen == SimTime{10});
  CHECK(e.now() == SimTime{100});
}

TEST_CASE("simultaneous events fire in insertion order") {
  Engine e(1);
  std::vector<std::uint32_t> order;
  e.set_handler([&](const Event& ev) { order.push_back(ev.target); });
  e.schedule(SimTime{10}, EventKind::StatsFlush, 'A');
  e.schedule(SimTime{10}, EventKind::StatsFlush, 'B');
  e.run_until(SimTime{10});
  CHECK(order == std::vector<std::uint32_t>{'A', 'B'});
}

TEST_CASE("scheduling into the past throws") {
  Engine e(1);
  e.run_until(SimTime{10});
  CHECK_THROWS_AS(e.schedule(SimTime{5}, EventKind::StatsFlush), PastEventError);
}

TEST_CASE("run_until on an empty queue only moves the clock") {
  Engine e(1);
  CHECK(e.run_until(SimTime{100}) == 0);
  CHECK(e.now() == SimTime{100});
}

TEST_CASE("run_until stops at its horizon") {
  Engine e(1);
  e.set_handler([](const Event&) {});
  for (int t : {1, 2, 3}) e.schedule(SimTime{t}, EventKind::StatsFlush);
  CHECK(e.run_until(SimTime{2}) == 2);
  CHECK(e.pending_count() == 1);
}

TEST_CASE("shuffled insertion of 10^4 events fires in (time, sequence) order") {
  Engine e(7);
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<int> t(0, 500);
  struct Key {
    std::int64_t at;
    std::uint64_t seq;
  };
  std::vector<Key> expected;
  for (int i = 0; i < 10'000; ++i) {
    const SimTime at{t(gen)};
    const auto seq = e.schedule(at, EventKind::StatsFlush, 0, static_cast<std::uint64_t>(i));
    expected.push_back({at.count(), seq});
  }
  std::stable_sort(expected.begin(), expected.end(), [](const Key& a, const Key& b) {
    return a.at != b.at ? a.at < b.at : a.seq < b.seq;
  });
  std::vector<Key> fired;
  e.set_handler([&](const Event& ev) {
    fired.push_back({ev.fire_at.count(), ev.sequence});
    CHECK(e.scheduled_count() == e.processed_count() + e.pending_count());
  });
  e.run_until(SimTime{1000});
  REQUIRE(fired.size() == expected.size());
  bool same = true;
  for (std::size_t i = 0; i < fired.size(); ++i) {
    same = same && fired[i].at == expected[i].at && fired[i].seq == expected[i].seq;
  }
  CHECK(same);
  CHECK(e.scheduled_count() == e.processed_count() + e.pending_count());
}

TEST_CASE("events scheduled from handlers keep the count invariant") {
  Engine e(3);
  int depth = 0;
  e.set_handler([&](const Event& ev) {
    if (++depth < 100) e.schedule(ev.fire_at + SimTime{5}, EventKind::StatsFlush);
    CHECK(e.scheduled_count() == e.processed_count() + e.pending_count());
  });
  e.schedule(SimTime{0}, EventKind::StatsFlush);
  e.run_until(SimTime{10'000});
  CHECK(e.processed_count() == 100);
  CHECK(e.pending_count() == 0);
}

TEST_CASE("identical runs replay identical event streams") {
  auto trace = [](std::uint64_t seed) {
    Engine e(seed);
    std::vector<std::uint64_t> out;
    e.set_handler([&](const Event& ev) {
      auto& r = e.rng("jitter");
      out.push_back(static_cast<std::uint64_t>(ev.fire_at.count()));
      if (out.size() < 1000) {
        e.schedule(ev.fire_at + SimTime{static_cast<std::int64_t>(r.uniform_int(1, 50))},
                   EventKind::StatsFlush);
      }
    });
    e.schedule(SimTime{0}, EventKind::StatsFlush);
    e.run_until(SimTime{1'000'000});
    return out;
  };
  CHECK(trace(5) == trace(5));
  CHECK(trace(5) != trace(6));
}

TEST_CASE("rng streams: continuation, independence, seeding") {
  Engine a(1);
  auto& s1 = a.rng("cbr");
  const auto first = s1.next_u64();
  auto& s2 = a.rng("cbr");
  CHECK(&s1 == &s2);
  CHECK(s2.draws() == 1);
  CHECK(s2.next_u64() != first);

  RngStream cbr("cbr", derive_stream_key(1, "cbr"));
  RngStream pareto("pareto", derive_stream_key(1, "pareto"));
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += cbr.next_u64() == pareto.next_u64();
  CHECK(equal == 0);

  RngStream m1("cbr", derive_stream_key(1, "cbr"));
  RngStream m2("cbr", derive_stream_key(2, "cbr"));
  CHECK(m1.next_u64() != m2.next_u64());
}

TEST_CASE("rng draws are platform-fixed values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  RngStream r("x", 0);
  RngStream again("x", 0);
  for (int i = 0; i < 10; ++i) CHECK(r.next_u64() == again.next_u64());
}

TEST_CASE("rng transforms stay in range and have the right means") {
  RngStream r("t", derive_stream_key(9, "t"));
  double sum = 0.0;
  double esum = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    const auto k = r.uniform_int(3, 7);
    REQUIRE(k >= 3);
    REQUIRE(k <= 7);
    esum += r.exponential(2.0);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(esum / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("bounded pareto respects its support and mean") {
  RngStream r("bp", derive_stream_key(4, "bp"));
  const BoundedPareto b{1.4, 1.0, 100.0};
  double sum = 0.0;
  const int n = 400'000;
  for (int i = 0; i < n; ++i) {
    const double x = b.sample(r);
    REQUIRE(x >= 1.0);
    REQUIRE(x <= 100.0);
    sum += x;
  }
  // Closed form: a L^a (L^(1-a) - H^(1-a)) / ((a-1)(1 - (L/H)^a)).
  const double a = 1.4;
  const double mean = a * (1.0 - std::pow(100.0, 1.0 - a)) / ((a - 1.0) * (1.0 - std::pow(0.01, a)));
  CHECK(b.mean() == doctest::Approx(mean).epsilon(1e-12));
  CHECK(sum / n == doctest::Approx(mean).epsilon(0.02));
}
