#include "ponsim/simulation.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>

#include "ponsim/engine.hpp"
#include "ponsim/errors.hpp"

namespace ponsim {

OfferedRates offered_rates(const ScenarioConfig& cfg, std::uint32_t onu, double load) {
  OfferedRates r;
  const double offered = load * cfg.guaranteed(onu);
  const auto& t = cfg.traffic;
  if (t.dc) r.dc_bps = t.cbr.rate_bps();
  const auto clients = cfg.fl_clients();
  if (std::find(clients.begin(), clients.end(), onu) != clients.end()) {
    r.fl_bps = t.fl_spec.nominal_rate_bps();
  }
  const double rest = std::max(0.0, offered - r.dc_bps - r.fl_bps);
  if (t.ds) r.ds_bps = rest / 2.0;
  if (t.be) r.be_bps = rest / 2.0;
  return r;
}

namespace {

std::string onu_stream(std::uint32_t onu, const char* what) {
  return "onu" + std::to_string(onu) + "/" + what;
}

}  // namespace

struct Simulation::Impl {
  struct Onu {
    std::uint32_t index = 0;
    SimTime one_way{};
    SimTime rtt{};
    OnuQueues queues;
    std::optional<CbrSource> dc;
    std::optional<ParetoOnOffSource> ds;
    std::optional<ParetoOnOffSource> be;
    GateMsg gate;
    ReportMsg report;
    SimTime last_burst_start{-1};
    std::array<std::uint64_t, kNumClasses> generated{};
    std::array<std::uint64_t, kNumClasses> sent{};
    std::map<std::uint32_t, std::uint64_t> fl_pending;
  };

  ScenarioConfig cfg;
  double load;
  std::uint64_t seed;
  SimulationOptions opts;
  Engine engine;
  std::vector<Onu> onus;
  std::unique_ptr<Olt> olt;
  std::unique_ptr<FlCoordinator> fl;
  std::vector<DelayCollector> delays;
  ClassOrder order;
  SimTime cycle_bound{};

  std::vector<SimTime> busy;
  SimTime cycle_sum{0};
  std::uint64_t cycle_count = 0;
  SimTime cycle_max{0};
  std::uint64_t cycle_violations = 0;
  long long first_cycle_violation = -1;
  std::uint64_t frames_sent = 0;

  Impl(const ScenarioConfig& c, double l, std::uint64_t s, SimulationOptions o)
      : cfg(c), load(l), seed(s), opts(std::move(o)), engine(s) {
    cfg.validate();
    order = service_order(cfg.scheduler);
    const auto discipline = queue_discipline(cfg.scheduler);

    std::vector<SlaProfile> slas;
    std::vector<SimTime> rtts;
    onus.resize(cfg.n_onus);
    for (std::uint32_t i = 0; i < cfg.n_onus; ++i) {
      auto& o = onus[i];
      o.index = i;
      auto& rr = engine.rng(onu_stream(i, "rtt"));
      o.one_way = SimTime{static_cast<std::int64_t>(
          rr.uniform_int(static_cast<std::uint64_t>(cfg.rtt_min.count() / 2),
                         static_cast<std::uint64_t>(cfg.rtt_max.count() / 2)))};
      o.rtt = 2 * o.one_way;
      o.queues = OnuQueues(discipline, cfg.buffer_bytes);
      const auto rates = offered_rates(cfg, i, load);
      if (rates.dc_bps > 0.0) o.dc.emplace(cfg.traffic.cbr, i, TrafficClass::DC);
      auto spec = cfg.traffic.pareto;
      if (rates.ds_bps > 0.0) {
        spec.target_rate_bps = rates.ds_bps;
        o.ds.emplace(spec, engine.rng(onu_stream(i, "ds")), i, TrafficClass::DS);
      }
      if (rates.be_bps > 0.0) {
        spec.target_rate_bps = rates.be_bps;
        o.be.emplace(spec, engine.rng(onu_stream(i, "be")), i, TrafficClass::BE);
      }
      SlaProfile sla;
      sla.guaranteed_bps = cfg.guaranteed(i);
      sla.wmax_bytes = cfg.wmax_bytes(i);
      slas.push_back(sla);
      rtts.push_back(o.rtt);
    }

    std::vector<GroupState> groups;
    for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
      GroupState gs;
      gs.id = static_cast<std::uint32_t>(g);
      gs.members = cfg.groups[g].members;
      gs.policy = cfg.groups[g].policy;
      for (auto m : gs.members) slas[m].group = gs.id;
      groups.push_back(std::move(gs));
    }

    std::vector<ChannelState> channels;
    for (std::uint32_t k = 0; k < cfg.n_wavelengths; ++k) {
      channels.push_back({k, cfg.line_rate_bps, SimTime{0}});
    }
    olt = std::make_unique<Olt>(cfg.scheduler, std::move(channels), std::move(slas),
                                std::move(rtts), std::move(groups));
    olt->set_gate_log(opts.gate_log);

    if (auto clients = cfg.fl_clients(); !clients.empty()) {
      fl = std::make_unique<FlCoordinator>(cfg.traffic.fl_spec, std::move(clients));
    }

    for (auto c : kAllClasses) {
      delays.emplace_back(cfg.warmup, cfg.reservoir,
                          engine.rng("metrics/" + std::string(to_string(c))));
    }
    busy.assign(cfg.n_wavelengths, SimTime{0});

    const SimTime max_frame = airtime(kMaxWireFrame, cfg.line_rate_bps);
    const SimTime slice = airtime(olt->slice().slice_bytes(), cfg.line_rate_bps);
    cycle_bound = cfg.max_cycle + slice + cfg.rtt_max +
                  cfg.n_onus * (cfg.guard + airtime(kReportBytes, cfg.line_rate_bps) +
                                2 * cfg.n_wavelengths * max_frame);

    engine.set_handler([this](const Event& ev) { dispatch(ev); });
  }

  void advance_to(Onu& o, SimTime t) {
    for (;;) {
      SimTime best = kNever;
      int which = -1;
      if (o.dc && o.dc->peek() < best) best = o.dc->peek(), which = 0;
      if (o.ds && o.ds->peek() < best) best = o.ds->peek(), which = 1;
      if (o.be && o.be->peek() < best) best = o.be->peek(), which = 2;
      if (which < 0 || best > t) return;
      Frame f = which == 0 ? o.dc->pop() : which == 1 ? o.ds->pop() : o.be->pop();
      ++o.generated[index_of(f.cls)];
      o.queues.enqueue(f);
    }
  }

  void deliver_gate(const GateMsg& g) {
    if (opts.on_gate) opts.on_gate(g);
    auto& o = onus[g.onu];
    o.gate = g;
    engine.schedule(engine.now() + o.one_way, EventKind::GateAtOnu, g.onu);
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::GateAtOnu: on_gate_at_onu(onus[ev.target]); break;
      case EventKind::TxStart: on_tx_start(onus[ev.target]); break;
      case EventKind::TxEnd: on_tx_end(onus[ev.target]); break;
      case EventKind::ReportAtOlt: on_report_at_olt(onus[ev.target]); break;
      case EventKind::FrameArrival:
        on_fl_arrival(onus[ev.target], static_cast<std::uint32_t>(ev.arg));
        break;
      case EventKind::FlRoundStart: on_round_start(static_cast<std::uint32_t>(ev.arg)); break;
      case EventKind::FlAggregate: on_aggregate(static_cast<std::uint32_t>(ev.arg)); break;
      case EventKind::StatsFlush: break;
    }
  }

  void on_gate_at_onu(Onu& o) {
    engine.schedule(o.gate.burst_start() - o.one_way, EventKind::TxStart, o.index);
  }

  void on_tx_start(Onu& o) {
    const SimTime now = engine.now();
    advance_to(o, now);
    const GateMsg& gate = o.gate;

    const SimTime start = gate.burst_start();
    if (o.last_burst_start.count() >= 0 && o.last_burst_start >= cfg.warmup) {
      const SimTime gap = start - o.last_burst_start;
      cycle_sum += gap;
      ++cycle_count;
      cycle_max = std::max(cycle_max, gap);
      if (gap > cycle_bound) {
        ++cycle_violations;
        if (first_cycle_violation < 0) first_cycle_violation = start.count();
      }
    }
    o.last_burst_start = start;

    auto bins = olt->bins_for(gate);
    o.queues.pack(bins, order);
    SimTime report_end{0};
    for (std::size_t b = 0; b < bins.size(); ++b) {
      const Grant& g = gate.grants[b];
      add_busy(g);
      if (g.carries_report) report_end = g.end();
      const auto rate = cfg.line_rate_bps;
      std::uint64_t cum = 0;
      for (const Frame& f : bins[b].frames) {
        cum += f.wire_bytes();
        const SimTime dep = g.start + airtime(cum, rate);
        depart(o, f, dep, g.wavelength);
      }
      if (cum > g.data_bytes) throw GrantOverflow("packed frames exceed their window");
    }
    engine.schedule(report_end - o.one_way, EventKind::TxEnd, o.index);
  }

  void add_busy(const Grant& g) {
    const SimTime lo = std::max(g.start, cfg.warmup);
    const SimTime hi = std::min(g.end(), cfg.duration);
    if (hi > lo) busy[g.wavelength] += hi - lo;
  }

  void depart(Onu& o, const Frame& f, SimTime dep, std::uint32_t wavelength) {
    ++o.sent[index_of(f.cls)];
    ++frames_sent;
    delays[index_of(f.cls)].record(f.arrival, dep - f.arrival);
    if (opts.on_departure) opts.on_departure(f, dep, wavelength);
    if (opts.frame_trace != nullptr) {
      *opts.frame_trace << f.onu << ',' << to_string(f.cls) << ',' << f.arrival.count() << ','
                        << dep.count() << ',' << wavelength << '\n';
    }
    if (f.fl_round && fl) {
      auto it = o.fl_pending.find(*f.fl_round);
      if (it != o.fl_pending.end() && --it->second == 0) {
        fl->mark_complete(o.index, *f.fl_round, dep);
        o.fl_pending.erase(it);
      }
    }
  }

  void on_tx_end(Onu& o) {
    advance_to(o, engine.now());
    o.report = build_report(o.index, o.queues, engine.now());
    engine.schedule(engine.now() + o.one_way, EventKind::ReportAtOlt, o.index);
  }

  void on_report_at_olt(Onu& o) {
    if (opts.on_report) opts.on_report(o.report);
    for (const auto& g : olt->on_report(o.report, engine.now())) deliver_gate(g);
  }

  void on_fl_arrival(Onu& o, std::uint32_t round) {
    const SimTime now = engine.now();
    advance_to(o, now);
    std::uint64_t accepted = 0;
    for (const auto& f : fl_round_frames(fl->spec(), o.index, round, now)) {
      ++o.generated[index_of(f.cls)];
      if (o.queues.enqueue(f)) ++accepted;
    }
    if (accepted > 0) o.fl_pending[round] = accepted;
  }

  void on_round_start(std::uint32_t round) {
    const auto& rec = fl->start_round(round, engine.now(), [this](std::uint32_t c) -> RngStream& {
      return engine.rng(onu_stream(c, "fl"));
    });
    for (const auto& c : rec.clients) {
      engine.schedule(c.upload_release, EventKind::FrameArrival, c.client, round);
    }
    engine.schedule(engine.now() + fl->spec().sync_window, EventKind::FlAggregate, 0, round);
  }

  void on_aggregate(std::uint32_t round) {
    fl->close_round(round, fl->spec().sync_window);
    engine.schedule(engine.now() + fl->spec().aggregation_delay, EventKind::FlRoundStart, 0,
                    round + 1);
  }

  RunResult run() {
    for (auto& o : onus) deliver_gate(olt->poll(o.index, SimTime{0}));
    if (fl) engine.schedule(SimTime{0}, EventKind::FlRoundStart, 0, 0);
    engine.run_until(cfg.duration);
    for (auto& o : onus) advance_to(o, cfg.duration);
    return collect();
  }

  RunResult collect() {
    RunResult r;
    r.labels.scenario = cfg.scenario;
    r.labels.scheduler = std::string(to_string(cfg.scheduler.kind));
    r.labels.policy = policy_label(cfg);
    r.labels.wavelength_policy = std::string(to_string(cfg.scheduler.wavelength.kind));
    r.seed = seed;
    r.load = load;
    r.events = engine.processed_count();
    r.frames_sent = frames_sent;

    for (auto c : kAllClasses) {
      r.delay[index_of(c)] = summarize(c, delays[index_of(c)]);
    }
    auto& inv = r.invariants;
    for (const auto& o : onus) {
      for (auto c : kAllClasses) {
        const auto k = index_of(c);
        r.drops[k] += o.queues.drops(c);
        r.frames_enqueued += o.generated[k] - o.queues.drops(c);
        if (o.generated[k] != o.sent[k] + o.queues.frames(c) + o.queues.drops(c)) {
          ++inv.conservation;
          if (inv.first.empty()) {
            inv.first = "frame conservation broken at onu " + std::to_string(o.index);
            inv.first_at_ns = cfg.duration.count();
          }
        }
      }
    }
    const auto& v = olt->violations();
    inv.guard = v.guard;
    inv.causality = v.causality;
    inv.window = v.window;
    if (v.first_at_ns >= 0 && (inv.first_at_ns < 0 || v.first_at_ns < inv.first_at_ns)) {
      inv.first = v.first;
      inv.first_at_ns = v.first_at_ns;
    }
    inv.cycle_bound = cycle_violations;
    if (first_cycle_violation >= 0 &&
        (inv.first_at_ns < 0 || first_cycle_violation < inv.first_at_ns)) {
      inv.first = "polling cycle exceeded its bound";
      inv.first_at_ns = first_cycle_violation;
    }
    inv.slice_exclusivity = olt->slice().exclusivity_violations();
    inv.slice_conservation = olt->slice().conservation_violations();

    const SimTime window = cfg.duration - cfg.warmup;
    for (auto b : busy) {
      r.utilization.push_back(static_cast<double>(b.count()) / static_cast<double>(window.count()));
    }
    if (cycle_count > 0) {
      r.mean_cycle_s = to_seconds(cycle_sum) / static_cast<double>(cycle_count);
    }
    r.max_cycle_s = to_seconds(cycle_max);

    if (fl) {
      double frac = 0.0;
      for (const auto& rec : fl->records()) {
        if (!rec.closed || rec.start < cfg.warmup || rec.clients.empty()) continue;
        ++r.fl_rounds;
        frac += rec.involved_fraction(rec.sync_window);
        for (const auto& c : rec.clients) {
          if (c.upload_complete) {
            r.fl_round_delays_s.push_back(to_seconds(*c.upload_complete - c.upload_release));
          }
        }
      }
      if (r.fl_rounds > 0) r.involved_fraction = frac / static_cast<double>(r.fl_rounds);
    }
    return r;
  }
};

Simulation::Simulation(const ScenarioConfig& cfg, double load, std::uint64_t seed,
                       SimulationOptions opts)
    : impl_(std::make_unique<Impl>(cfg, load, seed, std::move(opts))) {}

Simulation::~Simulation() = default;

RunResult Simulation::run() { return impl_->run(); }

const Olt& Simulation::olt() const { return *impl_->olt; }

const FlCoordinator* Simulation::fl() const { return impl_->fl.get(); }

SimTime Simulation::rtt(std::uint32_t onu) const { return impl_->onus.at(onu).rtt; }

RunResult run_scenario(const ScenarioConfig& cfg, double load, std::uint64_t seed,
                       SimulationOptions opts) {
  Simulation sim(cfg, load, seed, std::move(opts));
  return sim.run();
}

}  // namespace ponsim
