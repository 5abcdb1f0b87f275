#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ponsim/analytics.hpp"
#include "ponsim/config.hpp"
#include "ponsim/errors.hpp"
#include "ponsim/parallel.hpp"
#include "ponsim/selftest.hpp"
#include "ponsim/simulation.hpp"

namespace fs = std::filesystem;
using namespace ponsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

constexpr const char* kVersion = "0.1.0";

enum class LogLevel { Off, Gates, Frames };

LogLevel log_level() {
  const char* v = std::getenv("PONSIM_LOG");
  if (v == nullptr) return LogLevel::Off;
  const std::string s(v);
  if (s == "gates") return LogLevel::Gates;
  if (s == "frames") return LogLevel::Frames;
  return LogLevel::Off;
}

struct RunArgs {
  std::string config = "default";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> replications;
  int workers = 0;
  std::optional<double> duration_s;
  std::vector<double> loads;
};

ScenarioConfig load_config(const RunArgs& a) {
  ScenarioConfig cfg = a.config == "default" ? default_config() : parse_config(a.config);
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.replications) cfg.replications = *a.replications;
  if (a.duration_s) cfg.duration = from_seconds(*a.duration_s);
  if (!a.loads.empty()) cfg.loads = a.loads;
  cfg.validate();
  return cfg;
}

std::string load_tag(double load) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", load);
  return buf;
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".ponsim_write_probe";
  std::ofstream f(probe);
  if (ec || !f) throw ConfigError("output directory " + dir.string() + " is not writable");
  f.close();
  fs::remove(probe, ec);
}

std::vector<RunResult> run_point(const ScenarioConfig& cfg, double load, const fs::path& dir,
                                 int workers) {
  const LogLevel level = log_level();
  if (level == LogLevel::Off) {
    return run_replications_parallel(cfg, load, cfg.replications, cfg.master_seed, workers);
  }
  std::vector<RunResult> out;
  for (std::uint32_t r = 0; r < cfg.replications; ++r) {
    const auto seed = replication_seed(cfg.master_seed, r);
    const std::string stem = "load_" + load_tag(load) + "_seed_" + std::to_string(seed);
    std::ofstream gates(dir / ("gates_" + stem + ".log"));
    std::ofstream frames;
    SimulationOptions opts;
    opts.gate_log = &gates;
    if (level == LogLevel::Frames) {
      frames.open(dir / ("frames_" + stem + ".csv"));
      opts.frame_trace = &frames;
    }
    out.push_back(run_scenario(cfg, load, seed, opts));
  }
  return out;
}

/// Runs every load point of `cfg` into `dir`. Returns the exit code.
int run_all(const ScenarioConfig& cfg, const fs::path& dir, int workers, bool seed_override) {
  ensure_writable(dir);
  std::ofstream summary(dir / "summary.csv");
  summary << kSummaryHeader << '\n';
  nlohmann::json manifest;
  manifest["version"] = kVersion;
  std::ostringstream hash;
  hash << std::hex << config_hash(cfg);
  manifest["config_hash"] = hash.str();
  manifest["config"] = nlohmann::json::parse(to_json(cfg));
  manifest["master_seed"] = cfg.master_seed;
  manifest["seed_override"] = seed_override;
  manifest["replications"] = cfg.replications;
  manifest["files"] = nlohmann::json::array();

  int code = kExitOk;
  for (double load : cfg.loads) {
    const auto runs = run_point(cfg, load, dir, workers);
    const std::string name = "results_load_" + load_tag(load) + ".csv";
    std::ofstream csv(dir / name);
    write_csv_header(csv);
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& r : runs) {
      write_csv_rows(csv, r);
      seeds.push_back(r.seed);
      if (r.invariants.total() > 0) {
        std::cerr << "invariant violated (load " << load << ", seed " << r.seed << ") at t="
                  << r.invariants.first_at_ns << " ns: " << r.invariants.first << '\n';
        code = kExitInvariant;
      }
    }
    if (runs.size() >= 2) {
      const auto rows = summarize_replications(runs);
      write_summary_rows(summary, runs.front().labels, load, rows);
    }
    manifest["files"].push_back({{"load", load}, {"csv", name}, {"seeds", seeds}});
    std::cout << "load " << load_tag(load) << ": " << runs.size() << " replication(s) -> "
              << (dir / name).string() << '\n';
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  return code;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--config", a.config, "JSON config path, or 'default'");
  cmd->add_option("--out", a.out, "output directory")->required();
  cmd->add_option("--seed", a.seed, "master seed override");
  cmd->add_option("--replications", a.replications, "replications per load point");
  cmd->add_option("--workers", a.workers, "parallel replications (0: all cores)");
  cmd->add_option("--duration", a.duration_s, "simulated seconds per run");
  cmd->add_option("--loads", a.loads, "load points, e.g. 0.6,0.8")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upstream TWDM-EPON scheduling simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run every load point of a scenario");
  add_run_flags(run, run_args);

  RunArgs sweep_args;
  std::string schedulers = "IPACT_LIMITED,MW_BS,DWBA_FL:FL_FIRST,DWBA_FL:DC_FIRST";
  std::string wavelengths = "FF";
  auto* sweep = app.add_subcommand("sweep", "run a scenario for several scheduler variants");
  add_run_flags(sweep, sweep_args);
  sweep->add_option("--schedulers", schedulers, "KIND[:PRIORITY] list");
  sweep->add_option("--wavelength-policies", wavelengths, "SSD,MSD,FF subset");

  double cycle_us = 1000.0;
  double guard_us = 1.0;
  std::uint32_t n_onus = 32;
  std::vector<double> rtt_us{100.0, 150.0, 200.0};
  std::vector<std::uint32_t> n_group{0, 8, 16, 24, 28};
  double wlength_percent = 100.0;
  auto* waste = app.add_subcommand("waste", "print the wasted-bandwidth table as CSV");
  waste->add_option("--cycle-us", cycle_us);
  waste->add_option("--guard-us", guard_us);
  waste->add_option("--n-onus", n_onus);
  waste->add_option("--rtt-us", rtt_us)->delimiter(',');
  waste->add_option("--n-group", n_group)->delimiter(',');
  waste->add_option("--wlength-percent", wlength_percent);

  std::optional<std::string> fault;
  auto* selftest = app.add_subcommand("selftest", "run the analytic and oracle checks");
  selftest->add_option("--inject-fault", fault, "mutation to apply first (dba2, dba3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      const auto cfg = load_config(run_args);
      return run_all(cfg, run_args.out, run_args.workers, run_args.seed.has_value());
    }
    if (*sweep) {
      const auto base = load_config(sweep_args);
      int code = kExitOk;
      for (const auto& wl : split(wavelengths)) {
        for (const auto& sc : split(schedulers)) {
          ScenarioConfig cfg = base;
          const auto colon = sc.find(':');
          const auto kind = parse_scheduler_kind(sc.substr(0, colon));
          if (!kind) throw ConfigError("unknown scheduler " + sc);
          cfg.scheduler.kind = *kind;
          if (colon != std::string::npos) {
            const auto p = parse_priority_policy(sc.substr(colon + 1));
            if (!p) throw ConfigError("unknown priority policy in " + sc);
            cfg.scheduler.priority = *p;
          }
          const auto w = parse_wavelength_policy(wl);
          if (!w) throw ConfigError("unknown wavelength policy " + wl);
          cfg.scheduler.wavelength.kind = *w;
          cfg.scenario = base.scenario + "_" + std::string(to_string(cfg.scheduler.kind)) + "_" +
                         policy_label(cfg) + "_" + wl;
          cfg.validate();
          code = std::max(code, run_all(cfg, fs::path(sweep_args.out) / cfg.scenario,
                                        sweep_args.workers, sweep_args.seed.has_value()));
        }
      }
      return code;
    }
    if (*waste) {
      std::cout << "rtt_us,n_onus,n_group,wlength_percent,wmax_us,ipact_waste_percent,"
                   "gsipact_waste_percent\n";
      const double wmax = wmax_per_onu_us(cycle_us, n_onus, guard_us);
      for (double rtt : rtt_us) {
        for (auto g : n_group) {
          WasteInputs in;
          in.cycle = from_micros(cycle_us);
          in.rtt = from_micros(rtt);
          in.n_onus = n_onus;
          in.n_group = g;
          in.guard = from_micros(guard_us);
          in.wlength_percent = wlength_percent;
          std::cout << format_double(rtt) << ',' << n_onus << ',' << g << ','
                    << format_double(wlength_percent) << ',' << format_double(wmax) << ','
                    << format_double(ipact_waste_percent(in.cycle, in.rtt)) << ','
                    << format_double(gsipact_waste(in).percent) << '\n';
        }
      }
      return kExitOk;
    }
    if (*selftest) {
      return report_selftest(std::cout, run_selftest(fault));
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << " (line " << e.line << ", column " << e.column << ")\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated at t=" << e.at_ns << " ns: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitOk;
}
