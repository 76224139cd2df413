#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "macsim/config.hpp"
#include "macsim/node.hpp"
#include "macsim/time.hpp"

namespace macsim::metrics {

struct DeliveryRecord {
  std::int64_t packet = -1;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  Tick created = 0;
  Tick delivered = 0;
  int hops = 0;
};

// Per-node radio-mode residency in ticks, indexed by RadioMode. The four
// buckets always sum to the simulated horizon exactly.
using ModeTicks = std::array<Tick, 4>;

// Everything one replication produces. Ledgers from the same scenario
// (identical digest, different seeds) can be summarized together.
struct MetricsLedger {
  std::uint64_t scenario_digest = 0;
  std::uint64_t seed = 0;
  double tick_seconds = 1e-6;
  Tick horizon = 0;
  Tick cycle = 0;
  std::int64_t frames = 0;
  int warmup_frames = 0;

  std::vector<DeliveryRecord> deliveries;
  std::int64_t packets_offered = 0;
  std::int64_t packets_dropped = 0;  // drop-tail losses at full queues
  std::int64_t atim_sent = 0;
  std::int64_t atim_decoded = 0;
  std::int64_t data_collisions = 0;

  std::vector<ModeTicks> mode_ticks;
  EnergyModel energy;

  // Hops advanced and whole frames spent in flight, summed over deliveries;
  // their ratio is the measured per-frame reservation depth.
  std::int64_t hops_total = 0;
  std::int64_t flight_frames_total = 0;

  double node_energy_mj(NodeId n) const;
  double network_energy_mj() const;
};

// decoded / sent; throws ValidationError when no request was ever sent.
double measured_success_ratio(const MetricsLedger& ledger);

struct Stat {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
  bool defined() const { return n > 0; }
};

struct Summary {
  int reps = 0;
  Stat latency_s;          // delivered packets past warm-up only
  Stat latency_per_hop_s;
  Stat delivery_rate;
  Stat throughput_pps;     // delivered / horizon (definitional)
  Stat throughput_ppf;     // delivered / whole frames spanned by the burst
  Stat energy_network_mj;
  Stat energy_node_mean_mj;
  Stat success_ratio;
  Stat reserved_hops;      // measured hops advanced per frame in flight
};

// Mean and standard error across replications. Throws on an empty input or
// on ledgers from differing scenarios.
Summary summarize(const std::vector<MetricsLedger>& ledgers);

// CSV emission: one row per (sweep point, protocol, metric), deterministic
// order, fixed header. The analytic column is blank when no closed form
// applies to the metric.
struct CsvRow {
  std::string sweep_var;
  double value = 0.0;
  std::string protocol;
  std::string metric;
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
  std::optional<double> analytic;
};

void write_csv(std::ostream& out, std::vector<CsvRow> rows);

std::string format_double(double v);  // %.9g, shared by CSV and reports

}  // namespace macsim::metrics
