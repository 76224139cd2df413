#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macsim/metrics.hpp"
#include "macsim/scenario.hpp"

namespace macsim::presets {

// Experiment presets: parameter sweeps over the built-in 10%-duty,
// 18-data-slot frame on the 10-hop chain (throughput/energy/latency) and the
// request-contention star (success ratio). Each writes <name>.csv into
// out_dir; with tracing on, one trace file per replication sits alongside.
//
//   fig4  burst size 1..18, both protocols, per-frame throughput
//   fig5  identical single-flow load, both protocols, energy totals + ratio
//   fig6  hop count 1..10, both protocols, mean latency
//   fig7  contenders {2,5,10,15,20} at 20 mini-slots, request success ratio
//   fig8  mini-slots {5,10,20,40} at 10 contenders, request success ratio

struct PresetOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the built-in base seed
  std::optional<int> replications;
  bool trace = false;
};

bool is_preset_name(const std::string& name);
std::vector<std::string> preset_names();

// Returns the path of the CSV written. Throws ValidationError for unknown
// names or unusable output directories.
std::string run_preset(const std::string& name, const PresetOptions& opt);

// Analytic-vs-simulated report for one scenario.
struct CompareRow {
  std::string metric;
  std::optional<double> simulated;
  std::optional<double> analytic;
  std::optional<double> rel_error;
  std::string note;  // set when no analytic counterpart applies
};

std::vector<CompareRow> compare_scenario(const Scenario& sc);

// The scenario behind the built-in defaults (also what an empty scenario
// file loads to).
Scenario preset_base();

}  // namespace macsim::presets
