#include <map>
#include <sstream>

#include "doctest.h"
#include "macsim/channel.hpp"
#include "macsim/engine.hpp"

using namespace macsim;
using metrics::MetricsLedger;

namespace {

Scenario base_scenario(Protocol proto, const std::string& topo) {
  Scenario sc;
  sc.protocol = proto;
  sc.topology_spec = topo;
  sc.replications = 1;
  sc.horizon_frames = 12;
  return sc;
}

TrafficFlow single_at(NodeId src, NodeId dst, double offset_s) {
  TrafficFlow f;
  f.src = src;
  f.dst = dst;
  f.pattern = TrafficPattern::SingleAt;
  f.offset_uniform = false;
  f.offset_s = offset_s;
  return f;
}

struct TraceRun {
  MetricsLedger ledger;
  std::string trace;
};

TraceRun run_traced(const Scenario& sc, std::uint64_t rep = 0) {
  std::ostringstream os;
  TraceWriter tw(os);
  TraceRun out{run_replication(sc, rep, &tw), os.str()};
  return out;
}

// Parsed trace line, matching TraceWriter's fixed field order.
struct TraceLine {
  Tick tick;
  std::uint64_t seq;
  std::string kind;
  NodeId subject;
  std::string frame_kind;
  NodeId src, dst;
  std::string slots;
  std::int64_t payload;
};

std::vector<TraceLine> parse_trace(const std::string& text) {
  std::vector<TraceLine> out;
  std::istringstream is(text);
  TraceLine l;
  while (is >> l.tick >> l.seq >> l.kind >> l.subject >> l.frame_kind >> l.src >> l.dst >>
         l.slots >> l.payload) {
    out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_CASE("channel conservation: one outcome per link neighbor, always") {
  const Topology topo = Topology::linear_chain(2);  // 0-1-2
  Channel ch(&topo);

  WireFrame f;
  f.kind = FrameKind::Data;
  f.src = 1;
  f.dst = 0;
  const auto always = [](NodeId) { return true; };

  // Lone transmission: both link neighbors hear it intact.
  auto id = ch.begin(1, f, 0, 100, always);
  auto outcomes = ch.finish(id);
  REQUIRE(outcomes.size() == 2);
  for (const auto& oc : outcomes) CHECK(oc.intact);

  // Overlap at a common receiver corrupts both, and a sleeping receiver
  // still produces an outcome (discarded at the protocol layer).
  WireFrame g = f;
  g.src = 0;
  g.dst = 1;
  WireFrame h = f;
  h.src = 2;
  h.dst = 1;
  const auto asleep = [](NodeId) { return false; };
  auto ga = ch.begin(0, g, 0, 100, always);
  auto hb = ch.begin(2, h, 10, 90, asleep);
  auto out_g = ch.finish(ga);
  auto out_h = ch.finish(hb);
  REQUIRE(out_g.size() == 1);  // node 1 is 0's only link neighbor
  REQUIRE(out_h.size() == 1);
  CHECK_FALSE(out_g[0].intact);
  CHECK_FALSE(out_h[0].intact);
  CHECK(out_g[0].listening);
  CHECK_FALSE(out_h[0].listening);
}

TEST_CASE("identical scenario and seed replay to byte-identical traces") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:3");
  sc.flows = {single_at(0, 3, 0.0)};
  const TraceRun a = run_traced(sc);
  const TraceRun b = run_traced(sc);
  CHECK(a.trace == b.trace);
  CHECK(!a.trace.empty());
  CHECK(a.ledger.deliveries.size() == b.ledger.deliveries.size());

  const TraceRun c = run_traced(sc, /*rep=*/1);
  CHECK(a.trace != c.trace);  // different replication, different stream
}

TEST_CASE("two nodes, one packet: exactly one handshake quintuple on the air") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:1");
  sc.flows = {single_at(0, 1, 0.0)};
  const TraceRun run = run_traced(sc);

  std::map<std::string, int> tx_count;
  for (const auto& l : parse_trace(run.trace)) {
    if (l.kind == "tx") tx_count[l.frame_kind]++;
  }
  CHECK(tx_count["ATIM"] == 1);
  CHECK(tx_count["ACK"] == 1);
  CHECK(tx_count["RES"] == 1);
  CHECK(tx_count["DATA"] == 1);
  CHECK(tx_count["DACK"] == 1);

  REQUIRE(run.ledger.deliveries.size() == 1);
  CHECK(run.ledger.deliveries[0].hops == 1);
  CHECK(run.ledger.atim_sent == 1);
  CHECK(run.ledger.atim_decoded == 1);
}

TEST_CASE("zero traffic: every node is awake for exactly the active window") {
  for (Protocol proto : {Protocol::Hmac, Protocol::Smac}) {
    Scenario sc = base_scenario(proto, "linear:4");
    sc.flows = {single_at(0, 4, 100.0)};  // beyond the horizon: no packet materializes
    const MetricsLedger led = run_replication(sc, 0);
    CHECK(led.packets_offered == 0);
    for (NodeId n = 0; n <= 4; ++n) {
      const auto& m = led.mode_ticks[n];
      CHECK(m[static_cast<int>(RadioMode::IdleListen)] ==
            sc.horizon_frames * sc.frame.active_len);
      CHECK(m[static_cast<int>(RadioMode::Sleep)] ==
            sc.horizon_frames * (sc.frame.cycle_len() - sc.frame.active_len));
      CHECK(m[static_cast<int>(RadioMode::Rx)] == 0);
      CHECK(m[static_cast<int>(RadioMode::Tx)] == 0);
    }
  }
}

TEST_CASE("idle energy is identical across protocols under one duty config") {
  Scenario h = base_scenario(Protocol::Hmac, "linear:4");
  h.flows = {single_at(0, 4, 100.0)};
  Scenario s = h;
  s.protocol = Protocol::Smac;
  const MetricsLedger lh = run_replication(h, 0);
  const MetricsLedger ls = run_replication(s, 0);
  for (NodeId n = 0; n <= 4; ++n) {
    CHECK(lh.node_energy_mj(n) == ls.node_energy_mj(n));  // exact, by construction
  }
}

TEST_CASE("energy partition: mode residencies sum to the horizon exactly") {
  for (Protocol proto : {Protocol::Hmac, Protocol::Smac}) {
    Scenario sc = base_scenario(proto, "linear:4");
    sc.horizon_frames = 9;
    TrafficFlow f;
    f.src = 0;
    f.dst = 4;
    f.pattern = TrafficPattern::Burst;
    f.count = 5;
    f.offset_uniform = true;
    sc.flows = {f};
    const MetricsLedger led = run_replication(sc, 3);
    for (const auto& m : led.mode_ticks) {
      CHECK(m[0] + m[1] + m[2] + m[3] == led.horizon);
    }
  }
}

TEST_CASE("hidden pair: simultaneous requests from both sides of a relay collide") {
  // 0-1-2 chain, one mini-slot: 0 and 2 always pick the same slot, so node 1
  // never decodes either request.
  Scenario sc = base_scenario(Protocol::Hmac, "linear:2");
  sc.frame.atim_minislots = 10;  // still aligned; collision forced via draw below
  sc.frame.atim_minislots = 1;
  sc.flows = {single_at(0, 1, 0.0), single_at(2, 1, 0.0)};
  const TraceRun run = run_traced(sc);
  CHECK(run.ledger.deliveries.empty());
  CHECK(run.ledger.atim_decoded == 0);
  CHECK(run.ledger.atim_sent >= 2);
  for (const auto& l : parse_trace(run.trace)) {
    CHECK(l.kind != "rxok");  // nothing is ever decodable at any receiver
  }
}

TEST_CASE("lone contender always wins the window") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:1");
  sc.frame.atim_minislots = 1;
  sc.flows = {single_at(0, 1, 0.0)};
  const MetricsLedger led = run_replication(sc, 0);
  CHECK(led.deliveries.size() == 1);
  CHECK(led.atim_sent == 1);
  CHECK(led.atim_decoded == 1);
}

TEST_CASE("forward chain: a packet crosses two hops inside one frame") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:3");
  sc.flows = {single_at(0, 3, 0.0)};
  bool saw_two_hop_frame = false;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const MetricsLedger led = run_replication(sc, rep);
    REQUIRE(led.deliveries.size() == 1);
    CHECK(led.deliveries[0].hops == 3);
    // 3 hops at chain depth 2 takes 2 frames unless the draw hit the very
    // last mini-slot; never more than 3.
    CHECK(led.flight_frames_total >= 2);
    CHECK(led.flight_frames_total <= 3);
    if (led.flight_frames_total == 2) saw_two_hop_frame = true;
  }
  CHECK(saw_two_hop_frame);
}

TEST_CASE("inbound slot on the last data slot cannot chain onward") {
  // Force the inbound reservation onto the final slot: every earlier slot is
  // globally busy through a saturating cross flow is hard to stage, so use
  // the pure op contract instead (covered in protocol tests) plus the
  // system-level degenerate case: chain_limit=1 disables chaining entirely.
  Scenario sc = base_scenario(Protocol::Hmac, "linear:3");
  sc.hmac.chain_limit = 1;
  sc.flows = {single_at(0, 3, 0.0)};
  const MetricsLedger led = run_replication(sc, 0);
  REQUIRE(led.deliveries.size() == 1);
  CHECK(led.flight_frames_total == 3);  // one hop per frame, three frames
}

TEST_CASE("smac single sender delivers once per frame, one peer per frame") {
  Scenario sc = base_scenario(Protocol::Smac, "linear:1");
  sc.horizon_frames = 10;
  TrafficFlow f;
  f.src = 0;
  f.dst = 1;
  f.pattern = TrafficPattern::Backlog;
  sc.flows = {f};
  sc.smac.max_packets_per_frame = 1;
  const TraceRun run = run_traced(sc);
  // frames 0..9, one delivery per frame
  CHECK(run.ledger.deliveries.size() == sc.horizon_frames);

  // single-peer rule straight from the trace: all DATA a node sends within
  // one frame share one destination
  std::map<std::pair<Tick, NodeId>, std::set<NodeId>> peers;
  for (const auto& l : parse_trace(run.trace)) {
    if (l.kind == "tx" && l.frame_kind == "DATA") {
      peers[{l.tick / sc.frame.cycle_len(), l.src}].insert(l.dst);
    }
  }
  for (const auto& [key, dsts] : peers) CHECK(dsts.size() == 1);
}

TEST_CASE("smac equal backoffs collide and both retry") {
  Scenario sc = base_scenario(Protocol::Smac, "linear:2");
  sc.smac.contention_window = 1;  // both contenders always draw backoff 0
  sc.horizon_frames = 6;
  sc.flows = {single_at(0, 1, 0.0), single_at(2, 1, 0.0)};
  const TraceRun run = run_traced(sc);
  CHECK(run.ledger.deliveries.empty());
  CHECK(run.ledger.data_collisions >= 2 * (sc.horizon_frames - 1));
}

TEST_CASE("smac mean first-hop delay tracks T/2 plus backoff plus airtime") {
  Scenario sc = base_scenario(Protocol::Smac, "linear:1");
  sc.horizon_frames = 6;
  TrafficFlow f;
  f.src = 0;
  f.dst = 1;
  f.pattern = TrafficPattern::SingleUniform;
  sc.flows = {f};

  double sum = 0.0;
  const int reps = 400;
  for (int rep = 0; rep < reps; ++rep) {
    const MetricsLedger led = run_replication(sc, rep);
    REQUIRE(led.deliveries.size() == 1);
    sum += static_cast<double>(led.deliveries[0].delivered - led.deliveries[0].created) *
           led.tick_seconds;
  }
  const double mean = sum / reps;
  const double cycle_s = 1.0;
  const double expected = cycle_s / 2.0 + 0.025 + 0.04;  // T/2 + cw/2 + data airtime
  CHECK(mean == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("reservation safety: no DATA ever collides after a clean handshake") {
  // Randomized 2-hop scenarios are the acceptance criterion; a smaller smoke
  // version lives here.
  for (std::uint64_t rep = 0; rep < 25; ++rep) {
    Scenario sc = base_scenario(Protocol::Hmac, "linear:2");
    sc.horizon_frames = 5;
    TrafficFlow a = single_at(0, 2, 0.0);
    TrafficFlow b;
    b.src = 2;
    b.dst = 1;
    b.pattern = TrafficPattern::Burst;
    b.count = 3;
    b.offset_uniform = true;
    sc.flows = {a, b};
    const TraceRun run = run_traced(sc, rep);
    for (const auto& l : parse_trace(run.trace)) {
      CHECK(!(l.kind == "rxcol" && l.frame_kind == "DATA"));
    }
  }
}

TEST_CASE("three-way completeness: DATA only flies in slots that completed "
          "ATIM/ACK/RES in the same frame") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:3");
  sc.horizon_frames = 10;
  TrafficFlow f;
  f.src = 0;
  f.dst = 3;
  f.pattern = TrafficPattern::Burst;
  f.count = 4;
  f.offset_uniform = true;
  sc.flows = {f};

  for (std::uint64_t rep = 0; rep < 6; ++rep) {
    const TraceRun run = run_traced(sc, rep);
    const auto lines = parse_trace(run.trace);
    const Tick cycle = sc.frame.cycle_len();
    const Tick active = sc.frame.active_len;

    auto slot_of = [&](Tick tick) {
      return static_cast<int>((tick % cycle - active) / sc.frame.slot_len);
    };
    auto slots_contain = [](const std::string& slots, int s) {
      std::stringstream ss(slots);
      std::string item;
      while (std::getline(ss, item, ';')) {
        if (item == std::to_string(s)) return true;
      }
      return false;
    };

    int checked = 0;
    for (const auto& l : lines) {
      if (l.kind != "tx" || l.frame_kind != "DATA") continue;
      const Tick frame = l.tick / cycle;
      const int slot = slot_of(l.tick);
      bool atim = false;
      bool ack = false;
      bool res = false;
      for (const auto& m : lines) {
        if (m.tick / cycle != frame || m.tick >= l.tick || m.kind != "tx") continue;
        if (m.frame_kind == "ATIM" && m.src == l.src && m.dst == l.dst) atim = true;
        if (m.frame_kind == "ACK" && m.src == l.dst && m.dst == l.src &&
            slots_contain(m.slots, slot) && atim) {
          ack = true;
        }
        if (m.frame_kind == "RES" && m.src == l.src && m.dst == l.dst &&
            slots_contain(m.slots, slot) && ack) {
          res = true;
        }
      }
      CHECK(atim);
      CHECK(ack);
      CHECK(res);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("degenerate single-slot frame without chaining advances one hop per frame") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:3");
  sc.frame.data_slots = 1;  // cycle shrinks to active + one slot
  sc.hmac.chain_limit = 1;
  sc.flows = {single_at(0, 3, 0.0)};
  const MetricsLedger led = run_replication(sc, 0);
  REQUIRE(led.deliveries.size() == 1);
  CHECK(led.flight_frames_total == 3);  // exactly the contention baseline's slope
}

TEST_CASE("queue capacity drops overflow packets, drop-tail") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:1");
  sc.queue_capacity = 3;
  TrafficFlow f;
  f.src = 0;
  f.dst = 1;
  f.pattern = TrafficPattern::Burst;
  f.count = 8;
  f.offset_uniform = false;
  f.offset_s = 0.0;
  sc.flows = {f};
  const MetricsLedger led = run_replication(sc, 0);
  CHECK(led.packets_offered == 8);
  CHECK(led.packets_dropped == 5);
  CHECK(led.deliveries.size() == 3);
  // FIFO: the three survivors are the first three packets
  for (const auto& d : led.deliveries) CHECK(d.packet < 3);
}

TEST_CASE("ring topology routes and delivers") {
  Scenario sc = base_scenario(Protocol::Hmac, "ring:6");
  sc.flows = {single_at(0, 3, 0.0)};
  const MetricsLedger led = run_replication(sc, 0);
  REQUIRE(led.deliveries.size() == 1);
  CHECK(led.deliveries[0].hops == 3);
}

TEST_CASE("throughput times horizon equals the delivered count exactly") {
  Scenario sc = base_scenario(Protocol::Hmac, "linear:2");
  TrafficFlow f;
  f.src = 0;
  f.dst = 2;
  f.pattern = TrafficPattern::Burst;
  f.count = 6;
  f.offset_uniform = true;
  sc.flows = {f};
  const MetricsLedger led = run_replication(sc, 2);
  const auto summary = metrics::summarize({led});
  const double horizon_s = static_cast<double>(led.horizon) * led.tick_seconds;
  CHECK(std::llround(summary.throughput_pps.mean * horizon_s) ==
        static_cast<long long>(led.deliveries.size()));
}
