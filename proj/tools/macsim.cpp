// macsim - duty-cycled sensor MAC simulator and formula calculator.
//
// Exit codes: 0 success, 1 usage error, 2 validation/parse error,
// 3 internal assertion.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "macsim/analytic.hpp"
#include "macsim/engine.hpp"
#include "macsim/errors.hpp"
#include "macsim/metrics.hpp"
#include "macsim/presets.hpp"
#include "macsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace macsim;

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  bool trace = false;
};

Scenario load_with_overrides(const CommonOpts& o) {
  Scenario sc = o.scenario_path.empty() ? presets::preset_base() : load_scenario(o.scenario_path);
  if (o.seed) sc.seed = *o.seed;
  if (o.reps) sc.replications = *o.reps;
  return sc;
}

int cmd_run(const CommonOpts& o) {
  const Scenario sc = load_with_overrides(o);
  sc.validate();
  fs::create_directories(o.out_dir);

  std::vector<metrics::MetricsLedger> ledgers;
  for (int r = 0; r < sc.replications; ++r) {
    if (o.trace) {
      const fs::path p = fs::path(o.out_dir) / ("run_rep" + std::to_string(r) + ".trace");
      std::ofstream os(p);
      if (!os) throw ValidationError("cannot write " + p.string());
      TraceWriter tw(os);
      ledgers.push_back(run_replication(sc, r, &tw));
    } else {
      ledgers.push_back(run_replication(sc, r, nullptr));
    }
  }
  const metrics::Summary s = metrics::summarize(ledgers);

  std::vector<metrics::CsvRow> rows;
  const std::string proto = protocol_name(sc.protocol);
  auto push = [&](const char* metric, const metrics::Stat& st) {
    if (st.defined()) rows.push_back({"scenario", 0.0, proto, metric, st.mean, st.se, st.n, {}});
  };
  push("mean_latency_s", s.latency_s);
  push("latency_per_hop_s", s.latency_per_hop_s);
  push("delivery_rate", s.delivery_rate);
  push("throughput_pps", s.throughput_pps);
  push("throughput_ppf", s.throughput_ppf);
  push("energy_network_mj", s.energy_network_mj);
  push("energy_node_mean_mj", s.energy_node_mean_mj);
  push("success_ratio", s.success_ratio);
  push("reserved_hops_mean", s.reserved_hops);

  const fs::path p = fs::path(o.out_dir) / "summary.csv";
  std::ofstream os(p);
  if (!os) throw ValidationError("cannot write " + p.string());
  metrics::write_csv(os, rows);
  std::cout << p.string() << '\n';
  return 0;
}

int cmd_preset(const std::string& name, const CommonOpts& o) {
  presets::PresetOptions popt;
  popt.out_dir = o.out_dir;
  popt.seed = o.seed;
  popt.replications = o.reps;
  popt.trace = o.trace;
  std::cout << presets::run_preset(name, popt) << '\n';
  return 0;
}

int cmd_compare(const CommonOpts& o) {
  const Scenario sc = load_with_overrides(o);
  const auto rows = presets::compare_scenario(sc);
  std::cout << "metric,simulated,analytic,rel_error,note\n";
  for (const auto& r : rows) {
    std::cout << r.metric << ',';
    if (r.simulated) std::cout << metrics::format_double(*r.simulated);
    std::cout << ',';
    if (r.analytic) std::cout << metrics::format_double(*r.analytic);
    std::cout << ',';
    if (r.rel_error) std::cout << metrics::format_double(*r.rel_error);
    std::cout << ',' << r.note << '\n';
  }
  return 0;
}

struct CalcOpts {
  std::string op;
  double t_cs = 0.025;
  double t_tx = 0.04;
  double t_active = 0.1;
  double t_slot = 0.05;
  int slots = 18;
  int hops = 10;
  int reserved = 2;
  bool whole_frames = false;
  int n_p = 1;
  int n_m = 1;
  int contenders = 10;
  int mini_slots = 20;
  int occupancy = 0;
};

int cmd_calc(const CalcOpts& c) {
  analytic::TimingParams tp;
  tp.carrier_sense = c.t_cs;
  tp.tx_time = c.t_tx;
  tp.active_window = c.t_active;
  tp.slot_time = c.t_slot;
  tp.slot_count = c.slots;
  tp.hops = c.hops;
  tp.reserved_hops = c.reserved;
  if (c.t_cs == 0.0 &&
      (c.op == "ieee-latency" || c.op == "smac-latency")) {
    std::cerr << "warning: carrier_sense=0 models a zero-backoff degenerate case\n";
  }

  analytic::ThroughputParams thr;
  thr.packets_per_exchange = c.n_p;
  thr.peers_per_frame = c.n_m;
  thr.sleep_time = static_cast<double>(c.slots) * c.t_slot;
  thr.packet_time = c.t_tx;

  const analytic::ContentionParams cp{c.contenders, c.mini_slots};

  double value = 0.0;
  if (c.op == "ieee-latency") {
    value = analytic::ieee80211_latency(tp);
  } else if (c.op == "smac-latency") {
    value = analytic::smac_latency(tp);
  } else if (c.op == "hmac-latency") {
    value = analytic::hmac_latency(tp, c.whole_frames
                                           ? analytic::FrameRounding::whole_frames
                                           : analytic::FrameRounding::none);
  } else if (c.op == "frame-length") {
    value = analytic::hmac_frame_length(tp);
  } else if (c.op == "duty-fraction") {
    value = analytic::duty_fraction(tp);
  } else if (c.op == "smac-throughput") {
    value = analytic::smac_throughput(thr, tp);
  } else if (c.op == "hmac-throughput") {
    value = analytic::hmac_throughput(thr, tp);
  } else if (c.op == "collision-pmf") {
    value = analytic::collision_slot_pmf(c.occupancy, cp);
  } else if (c.op == "expected-slots") {
    value = analytic::expected_slots_with(c.occupancy, cp);
  } else if (c.op == "expected-collided") {
    value = analytic::expected_collided(cp);
  } else if (c.op == "success-ratio") {
    value = analytic::success_ratio(cp);
  } else {
    throw ValidationError("unknown calc op '" + c.op + "'");
  }
  std::cout << metrics::format_double(value) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Duty-cycled wireless-sensor MAC simulator (slot reservation vs. "
               "contention baseline) with closed-form latency/throughput/contention models"};
  app.require_subcommand(1);

  CommonOpts common;
  auto add_common = [&](CLI::App* sub, bool with_scenario) {
    if (with_scenario) {
      sub->add_option("--scenario", common.scenario_path,
                      "scenario file (key=value sections); omit for the built-in preset");
    }
    sub->add_option("--out", common.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", [&](const CLI::results_t& v) {
      common.seed = std::stoull(v[0]);
      return true;
    }, "override the scenario base seed");
    sub->add_option("--reps", [&](const CLI::results_t& v) {
      common.reps = std::stoi(v[0]);
      return true;
    }, "override the replication count");
    sub->add_flag("--trace", common.trace, "write one event-trace file per replication");
  };

  auto* run = app.add_subcommand("run", "simulate a scenario and write summary.csv");
  add_common(run, true);

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "reproduce a built-in experiment (fig4..fig8)");
  preset->add_option("--name", preset_name, "one of fig4, fig5, fig6, fig7, fig8")->required();
  add_common(preset, false);

  auto* compare = app.add_subcommand("compare", "simulated vs analytic report for a scenario");
  add_common(compare, true);

  CalcOpts calc;
  auto* calcc = app.add_subcommand("calc", "evaluate one closed-form model");
  calcc->add_option("--op", calc.op,
                    "ieee-latency|smac-latency|hmac-latency|frame-length|duty-fraction|"
                    "smac-throughput|hmac-throughput|collision-pmf|expected-slots|"
                    "expected-collided|success-ratio")
      ->required();
  calcc->add_option("--t-cs", calc.t_cs, "mean backoff delay, s")->capture_default_str();
  calcc->add_option("--t-tx", calc.t_tx, "packet airtime, s")->capture_default_str();
  calcc->add_option("--t-active", calc.t_active, "active window, s")->capture_default_str();
  calcc->add_option("--t-slot", calc.t_slot, "slot length, s")->capture_default_str();
  calcc->add_option("--slots", calc.slots, "data slots per cycle")->capture_default_str();
  calcc->add_option("--hops", calc.hops, "path length")->capture_default_str();
  calcc->add_option("--reserved-hops", calc.reserved, "hops reserved per frame")
      ->capture_default_str();
  calcc->add_flag("--whole-frames", calc.whole_frames,
                  "quantize reservation latency to whole frames");
  calcc->add_option("--n-p", calc.n_p, "packets per exchange")->capture_default_str();
  calcc->add_option("--n-m", calc.n_m, "peers per frame")->capture_default_str();
  calcc->add_option("--contenders", calc.contenders, "competing requesters")
      ->capture_default_str();
  calcc->add_option("--mini-slots", calc.mini_slots, "contention mini-slots")
      ->capture_default_str();
  calcc->add_option("--occupancy", calc.occupancy, "slot occupancy n for pmf ops")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(common);
    if (preset->parsed()) return cmd_preset(preset_name, common);
    if (compare->parsed()) return cmd_compare(common);
    if (calcc->parsed()) return cmd_calc(calc);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
