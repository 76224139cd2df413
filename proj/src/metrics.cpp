#include "macsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "macsim/errors.hpp"

namespace macsim::metrics {

namespace {

Stat make_stat(std::vector<double> samples) {
  // Accumulation order is fixed by sorting so that summarize is permutation
  // invariant bit for bit, not just mathematically.
  std::sort(samples.begin(), samples.end());
  Stat s;
  s.n = static_cast<int>(samples.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / s.n;
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(ss / (s.n - 1) / s.n);
  }
  return s;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

double MetricsLedger::node_energy_mj(NodeId n) const {
  const ModeTicks& m = mode_ticks[n];
  const double sleep = static_cast<double>(m[static_cast<int>(RadioMode::Sleep)]);
  const double idle = static_cast<double>(m[static_cast<int>(RadioMode::IdleListen)]);
  const double rx = static_cast<double>(m[static_cast<int>(RadioMode::Rx)]);
  const double tx = static_cast<double>(m[static_cast<int>(RadioMode::Tx)]);
  // mW * s = mJ
  return (sleep * energy.p_sleep_mw + idle * energy.p_idle_mw + rx * energy.p_rx_mw +
          tx * energy.p_tx_mw) *
         tick_seconds;
}

double MetricsLedger::network_energy_mj() const {
  double total = 0.0;
  for (NodeId n = 0; n < static_cast<NodeId>(mode_ticks.size()); ++n) {
    total += node_energy_mj(n);
  }
  return total;
}

double measured_success_ratio(const MetricsLedger& ledger) {
  if (ledger.atim_sent == 0) {
    throw ValidationError("success ratio undefined: no request was sent");
  }
  return static_cast<double>(ledger.atim_decoded) / static_cast<double>(ledger.atim_sent);
}

Summary summarize(const std::vector<MetricsLedger>& ledgers) {
  if (ledgers.empty()) throw ValidationError("summarize: no ledgers");
  const std::uint64_t digest = ledgers.front().scenario_digest;
  for (const auto& l : ledgers) {
    if (l.scenario_digest != digest) {
      throw ValidationError("summarize: ledgers come from different scenarios");
    }
  }

  std::vector<double> latency, per_hop, rate, pps, ppf, e_net, e_node, ratio, rhops;
  for (const auto& l : ledgers) {
    const Tick warmup_edge = static_cast<Tick>(l.warmup_frames) * l.cycle;
    std::vector<double> lat_samples;
    for (const auto& d : l.deliveries) {
      if (d.created < warmup_edge) continue;
      lat_samples.push_back(static_cast<double>(d.delivered - d.created) * l.tick_seconds);
    }
    if (!lat_samples.empty()) {
      double sum = 0.0;
      double sum_h = 0.0;
      for (std::size_t i = 0; i < lat_samples.size(); ++i) sum += lat_samples[i];
      for (const auto& d : l.deliveries) {
        if (d.created < warmup_edge) continue;
        sum_h += static_cast<double>(d.delivered - d.created) * l.tick_seconds / d.hops;
      }
      latency.push_back(sum / lat_samples.size());
      per_hop.push_back(sum_h / lat_samples.size());
    }

    if (l.packets_offered > 0) {
      rate.push_back(static_cast<double>(l.deliveries.size()) /
                     static_cast<double>(l.packets_offered));
    }

    const double horizon_s = static_cast<double>(l.horizon) * l.tick_seconds;
    pps.push_back(static_cast<double>(l.deliveries.size()) / horizon_s);

    if (!l.deliveries.empty()) {
      std::int64_t first_frame = INT64_MAX;
      std::int64_t last_frame = 0;
      for (const auto& d : l.deliveries) {
        first_frame = std::min(first_frame, ceil_div(d.created, l.cycle));
        last_frame = std::max(last_frame, d.delivered / l.cycle);
      }
      const double span = static_cast<double>(last_frame - first_frame + 1);
      ppf.push_back(static_cast<double>(l.deliveries.size()) / span);
    }

    e_net.push_back(l.network_energy_mj());
    e_node.push_back(l.network_energy_mj() / static_cast<double>(l.mode_ticks.size()));
    if (l.atim_sent > 0) ratio.push_back(measured_success_ratio(l));
    if (l.flight_frames_total > 0) {
      rhops.push_back(static_cast<double>(l.hops_total) /
                      static_cast<double>(l.flight_frames_total));
    }
  }

  Summary s;
  s.reps = static_cast<int>(ledgers.size());
  s.latency_s = make_stat(latency);
  s.latency_per_hop_s = make_stat(per_hop);
  s.delivery_rate = make_stat(rate);
  s.throughput_pps = make_stat(pps);
  s.throughput_ppf = make_stat(ppf);
  s.energy_network_mj = make_stat(e_net);
  s.energy_node_mean_mj = make_stat(e_node);
  s.success_ratio = make_stat(ratio);
  s.reserved_hops = make_stat(rhops);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_csv(std::ostream& out, std::vector<CsvRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const CsvRow& x, const CsvRow& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.protocol != y.protocol) return x.protocol < y.protocol;
    return x.metric < y.metric;
  });
  out << "sweep_var,value,protocol,metric,mean,stderr,n_reps,analytic\n";
  for (const auto& r : rows) {
    out << r.sweep_var << ',' << format_double(r.value) << ',' << r.protocol << ','
        << r.metric << ',' << format_double(r.mean) << ',' << format_double(r.se) << ','
        << r.n << ',';
    if (r.analytic) out << format_double(*r.analytic);
    out << '\n';
  }
}

}  // namespace macsim::metrics
