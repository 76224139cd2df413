#include "macsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include "macsim/channel.hpp"
#include "macsim/errors.hpp"
#include "macsim/events.hpp"
#include "macsim/node.hpp"
#include "macsim/proto/hmac.hpp"
#include "macsim/proto/smac.hpp"
#include "macsim/rng.hpp"

namespace macsim {

namespace {

// Timer tags (Event::a).
constexpr int kTimerAtim = 1;
constexpr int kTimerCtrl = 2;
constexpr int kTimerSmacAttempt = 3;
constexpr int kTimerSmacNext = 4;
constexpr int kTimerSmacGiveUp = 5;
constexpr int kTimerSmacIdleCheck = 6;

constexpr std::uint64_t kTrafficStream = 0x74726166666963ULL;
constexpr std::uint64_t kNodeStream = 0x6e6f6465ULL;

struct PendingRequest {
  NodeId peer = kNoNode;
  std::int64_t flow = -1;
  int want = 0;
  int chain_depth = 0;
  std::vector<int> inbound_slots;  // empty for a source request
};

struct NodeRuntime {
  NodeState st;
  Rng rng;
  Tick last_mode_change = 0;

  // Slot-reservation protocol
  std::optional<PendingRequest> pending;
  std::map<int, std::int64_t> slot_packet;  // send slot -> packet id
  std::map<int, int> forward_map;           // inbound slot -> chained outbound slot
  std::deque<WireFrame> ctrl_outbox;

  // Contention baseline
  std::optional<proto::BurstPlan> burst;
  std::size_t burst_pos = 0;
  bool burst_active = false;
  std::int64_t awaiting_ack = -1;
  bool engaged_rx = false;

  std::set<std::int64_t> seen;  // accepted packet ids (duplicate suppression)
  std::int64_t backlog_flow = -1;

  NodeRuntime(NodeId id, std::uint64_t seed) : rng(seed) { st.id = id; }
};

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

class Simulation {
 public:
  Simulation(const Scenario& sc, std::uint64_t replication, TraceWriter* trace)
      : sc_(sc),
        topo_(sc.build_topology()),
        flows_(sc.effective_flows()),
        channel_(&topo_),
        trace_(trace),
        rep_seed_(Rng::mix(sc.seed, replication)) {
    sc_.validate();
    cycle_ = sc_.frame.cycle_len();
    horizon_ = cycle_ * sc_.horizon_frames;

    ledger_.scenario_digest = sc_.digest();
    ledger_.seed = rep_seed_;
    ledger_.tick_seconds = sc_.ticks.tick_seconds;
    ledger_.horizon = horizon_;
    ledger_.cycle = cycle_;
    ledger_.frames = sc_.horizon_frames;
    ledger_.warmup_frames = sc_.warmup_frames;
    ledger_.energy = sc_.energy;
    ledger_.mode_ticks.assign(topo_.node_count(), metrics::ModeTicks{0, 0, 0, 0});

    nodes_.reserve(topo_.node_count());
    for (NodeId n = 0; n < topo_.node_count(); ++n) {
      nodes_.emplace_back(n, Rng::mix(rep_seed_, Rng::mix(kNodeStream, n)));
    }
    generate_traffic(replication);
  }

  metrics::MetricsLedger run() {
    // Arrivals first: a packet created exactly on a boundary joins that
    // frame's planning (matching the eligibility rule created <= frame start).
    for (const auto& ev : initial_arrivals_) queue_.schedule(now_, ev);
    queue_.schedule(now_, Event{0, 0, EventKind::FrameBoundary, kNoNode, 0, 0, -1});

    while (!queue_.empty() && !done_) {
      const Event e = queue_.pop();
      assert(e.time >= now_);
      now_ = e.time;
      dispatch(e);
    }
    return ledger_;
  }

 private:
  // ---- setup -------------------------------------------------------------

  void generate_traffic(std::uint64_t replication) {
    // Arrival streams depend on (seed, replication) only, never on the
    // protocol, so both protocols face identical offered load.
    Rng arr(Rng::mix(sc_.seed, Rng::mix(kTrafficStream, replication)));
    const Tick warm_edge = static_cast<Tick>(sc_.warmup_frames) * cycle_;

    for (std::size_t fi = 0; fi < flows_.size(); ++fi) {
      const TrafficFlow& f = flows_[fi];
      auto push_packet = [&](Tick created) {
        if (created >= horizon_) return;
        AppPacket p;
        p.id = static_cast<std::int64_t>(packets_.size());
        p.flow = static_cast<std::int64_t>(fi);
        p.flow_src = f.src;
        p.flow_dst = f.dst;
        p.created = created;
        packets_.push_back(p);
        Event ev;
        ev.time = created;
        ev.kind = EventKind::PacketArrival;
        ev.subject = f.src;
        ev.packet_id = p.id;
        initial_arrivals_.push_back(ev);
      };

      switch (f.pattern) {
        case TrafficPattern::SingleUniform:
          push_packet(warm_edge + arr.uniform_tick(cycle_));
          break;
        case TrafficPattern::SingleAt:
          push_packet(sc_.ticks.to_ticks(f.offset_s, "flow offset"));
          break;
        case TrafficPattern::Burst: {
          const Tick at = f.offset_uniform
                              ? warm_edge + arr.uniform_tick(cycle_)
                              : sc_.ticks.to_ticks(f.offset_s, "flow offset");
          for (int k = 0; k < f.count; ++k) push_packet(at);
          break;
        }
        case TrafficPattern::Rate: {
          const double inter_ticks = 1.0 / (f.rate_pps * sc_.ticks.tick_seconds);
          for (std::int64_t k = 0;; ++k) {
            const Tick at = warm_edge + static_cast<Tick>(std::llround(k * inter_ticks));
            if (at >= horizon_) break;
            push_packet(at);
          }
          break;
        }
        case TrafficPattern::Backlog: {
          NodeRuntime& rt = nodes_[f.src];
          if (rt.st.backlogged) {
            throw ValidationError("node " + std::to_string(f.src) +
                                  " has more than one backlog flow");
          }
          rt.st.backlogged = true;
          rt.st.backlog_dst = f.dst;
          rt.backlog_flow = static_cast<std::int64_t>(fi);
          break;
        }
      }
    }
  }

  // ---- small helpers -----------------------------------------------------

  bool hmac() const { return sc_.protocol == Protocol::Hmac; }

  NodeId route(NodeId from, NodeId dst) {
    auto it = routes_.find(dst);
    if (it == routes_.end()) {
      std::vector<NodeId> table(topo_.node_count());
      for (NodeId v = 0; v < topo_.node_count(); ++v) table[v] = topo_.next_hop(v, dst);
      it = routes_.emplace(dst, std::move(table)).first;
    }
    return it->second[from];
  }

  void set_mode(NodeId n, RadioMode m) {
    NodeRuntime& rt = nodes_[n];
    if (rt.st.radio == m) return;
    if (now_ < rt.last_mode_change) {
      throw std::logic_error("radio mode accounting ran backwards");
    }
    ledger_.mode_ticks[n][static_cast<int>(rt.st.radio)] += now_ - rt.last_mode_change;
    rt.last_mode_change = now_;
    rt.st.radio = m;
  }

  bool listening(NodeId n) const {
    return nodes_[n].st.radio == RadioMode::IdleListen || nodes_[n].st.radio == RadioMode::Rx;
  }

  void schedule_timer(NodeId n, Tick at, int tag, std::int64_t packet_id = -1) {
    Event e;
    e.time = at;
    e.kind = EventKind::Timer;
    e.subject = n;
    e.a = tag;
    e.packet_id = packet_id;
    queue_.schedule(now_, e);
  }

  void trace(const char* kind, NodeId subject, const WireFrame* frame, std::int64_t payload) {
    if (trace_) trace_->line(now_, trace_seq_++, kind, subject, frame, payload);
  }

  bool in_data_period() const { return now_ >= frame_start_ + sc_.frame.active_len; }

  int current_minislot() const {
    return static_cast<int>((now_ - frame_start_) / sc_.frame.minislot_len());
  }

  bool eligible(const AppPacket& p) const { return p.created <= frame_start_; }

  // ---- event dispatch ------------------------------------------------------

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::FrameBoundary: on_frame_boundary(e.a); break;
      case EventKind::WindowEdge: on_window_edge(); break;
      case EventKind::SlotEdge: on_slot_edge(e.a); break;
      case EventKind::TxEnd: on_tx_end(e.tx_id); break;
      case EventKind::PacketArrival: on_arrival(e.subject, e.packet_id); break;
      case EventKind::Timer: on_timer(e.subject, e.a, e.packet_id); break;
    }
  }

  // FIFO enqueue with drop-tail overflow at the configured capacity.
  bool enqueue(NodeId n, std::int64_t pid) {
    NodeRuntime& rt = nodes_[n];
    if (sc_.queue_capacity > 0 &&
        static_cast<int>(rt.st.tx_queue.size()) >= sc_.queue_capacity) {
      ledger_.packets_dropped++;
      trace("drop", n, nullptr, pid);
      return false;
    }
    rt.st.tx_queue.push_back(packets_[pid]);
    return true;
  }

  void on_arrival(NodeId n, std::int64_t pid) {
    ledger_.packets_offered++;
    AppPacket& p = packets_[pid];
    p.next_hop = route(n, p.flow_dst);
    enqueue(n, pid);
  }

  void on_frame_boundary(std::int64_t f) {
    if (f >= sc_.horizon_frames) {
      flush_energy();
      done_ = true;
      return;
    }
    frame_ = f;
    frame_start_ = now_;
    trace("frame", kNoNode, nullptr, f);

    queue_.schedule(now_, Event{now_ + sc_.frame.active_len, 0, EventKind::WindowEdge});
    if (hmac()) {
      for (int s = 0; s < sc_.frame.data_slots; ++s) {
        Event ev{now_ + sc_.frame.slot_offset(s), 0, EventKind::SlotEdge};
        ev.a = s;
        queue_.schedule(now_, ev);
      }
    }
    Event nb{now_ + cycle_, 0, EventKind::FrameBoundary};
    nb.a = static_cast<int>(f + 1);
    queue_.schedule(now_, nb);

    for (NodeId n = 0; n < topo_.node_count(); ++n) {
      NodeRuntime& rt = nodes_[n];
      rt.st.ledger.reset(f);
      rt.st.requested_this_frame = false;
      rt.pending.reset();
      rt.slot_packet.clear();
      rt.forward_map.clear();
      rt.ctrl_outbox.clear();
      rt.burst.reset();
      rt.burst_active = false;
      rt.burst_pos = 0;
      rt.awaiting_ack = -1;
      rt.engaged_rx = false;
      for (AppPacket& held : rt.st.tx_queue) {
        held.in_flight_slot = -1;
        packets_[held.id].in_flight_slot = -1;
      }
      set_mode(n, RadioMode::IdleListen);

      if (rt.st.backlogged) refill_backlog(n);

      if (hmac()) {
        plan_request(n);
      } else {
        plan_burst(n);
      }
    }
  }

  void refill_backlog(NodeId n) {
    NodeRuntime& rt = nodes_[n];
    for (const AppPacket& held : rt.st.tx_queue) {
      if (held.created <= frame_start_) return;
    }
    AppPacket p;
    p.id = static_cast<std::int64_t>(packets_.size());
    p.flow = rt.backlog_flow;
    p.flow_src = n;
    p.flow_dst = rt.st.backlog_dst;
    p.created = frame_start_;
    p.next_hop = route(n, p.flow_dst);
    packets_.push_back(p);
    ledger_.packets_offered++;
    enqueue(n, p.id);
  }

  // Source-side request: one ATIM per frame at a uniformly drawn mini-slot.
  void plan_request(NodeId n) {
    NodeRuntime& rt = nodes_[n];
    NodeId peer = kNoNode;
    int want = 0;
    std::int64_t flow = -1;
    for (const AppPacket& p : rt.st.tx_queue) {
      if (!eligible(p)) continue;
      if (peer == kNoNode) {
        peer = p.next_hop;
        flow = p.flow;
      }
      if (p.next_hop != peer) continue;
      ++want;
    }
    if (peer == kNoNode) return;
    want = std::min(want, sc_.hmac.effective_max_want(sc_.frame));

    PendingRequest req;
    req.peer = peer;
    req.flow = flow;
    req.want = want;
    rt.pending = req;
    const int slot = proto::atim_window_access(rt.rng, sc_.frame.atim_minislots);
    schedule_timer(n, frame_start_ + static_cast<Tick>(slot) * sc_.frame.minislot_len(),
                   kTimerAtim);
  }

  void plan_burst(NodeId n) {
    NodeRuntime& rt = nodes_[n];
    auto plan = proto::plan_frame_burst(rt.st, sc_.smac, frame_start_, rt.rng);
    if (!plan) return;
    rt.burst = plan;
    schedule_timer(n, frame_start_ + plan->backoff, kTimerSmacAttempt);
  }

  void on_window_edge() {
    trace("window", kNoNode, nullptr, frame_);
    for (NodeId n = 0; n < topo_.node_count(); ++n) {
      NodeRuntime& rt = nodes_[n];
      if (hmac()) {
        // Unconfirmed grants die with the window; the receiver only wakes
        // for three-way-complete reservations.
        for (auto it = rt.st.ledger.mine.begin(); it != rt.st.ledger.mine.end();) {
          if (it->second.dir == SlotDir::Receive && !it->second.confirmed) {
            it = rt.st.ledger.mine.erase(it);
          } else {
            ++it;
          }
        }
        if (listening(n)) set_mode(n, RadioMode::Sleep);
      } else {
        if (rt.st.radio == RadioMode::IdleListen && !rt.burst_active && !rt.engaged_rx) {
          set_mode(n, RadioMode::Sleep);
        }
      }
    }
  }

  void on_slot_edge(int slot) {
    // First settle radio modes so receivers listen before senders key up.
    for (NodeId n = 0; n < topo_.node_count(); ++n) {
      NodeRuntime& rt = nodes_[n];
      const auto it = rt.st.ledger.mine.find(slot);
      const bool participant = it != rt.st.ledger.mine.end() && it->second.confirmed;
      if (participant) {
        if (rt.st.radio == RadioMode::Sleep) set_mode(n, RadioMode::IdleListen);
      } else if (rt.st.radio != RadioMode::Sleep && rt.st.radio != RadioMode::Tx &&
                 rt.st.radio != RadioMode::Rx) {
        set_mode(n, RadioMode::Sleep);
      }
    }
    for (NodeId n = 0; n < topo_.node_count(); ++n) {
      NodeRuntime& rt = nodes_[n];
      const auto it = rt.st.ledger.mine.find(slot);
      if (it == rt.st.ledger.mine.end() || !it->second.confirmed) continue;
      if (it->second.dir != SlotDir::Send) continue;
      const auto pk = rt.slot_packet.find(slot);
      if (pk == rt.slot_packet.end()) {
        // Chained slot whose inbound packet never arrived.
        set_mode(n, RadioMode::Sleep);
        continue;
      }
      WireFrame data;
      data.kind = FrameKind::Data;
      data.src = n;
      data.dst = it->second.peer;
      data.payload_id = pk->second;
      begin_tx(n, data);
    }
  }

  void begin_tx(NodeId n, const WireFrame& frame) {
    assert(nodes_[n].st.radio != RadioMode::Tx);
    set_mode(n, RadioMode::Tx);
    channel_.jam_receptions_at(n);
    const Tick end = now_ + frame.airtime(sc_.air);
    const std::uint64_t id =
        channel_.begin(n, frame, now_, end, [&](NodeId v) { return listening(v); });
    trace("tx", n, &frame, frame.payload_id);
    if (frame.kind == FrameKind::Atim) ledger_.atim_sent++;
    for (NodeId v : topo_.link_neighbors(n)) {
      if (nodes_[v].st.radio == RadioMode::IdleListen) set_mode(v, RadioMode::Rx);
    }
    Event e{end, 0, EventKind::TxEnd};
    e.tx_id = id;
    queue_.schedule(now_, e);
  }

  void on_tx_end(std::uint64_t id) {
    const WireFrame frame = channel_.frame_of(id);
    const NodeId src = channel_.source_of(id);
    const auto outcomes = channel_.finish(id);

    set_mode(src, RadioMode::IdleListen);
    after_own_tx(src, frame);

    for (const auto& oc : outcomes) {
      if (!oc.listening) continue;  // asleep or deaf (own tx) for the span
      NodeRuntime& rt = nodes_[oc.receiver];
      if (!listening(oc.receiver)) continue;  // stopped listening mid-span
      if (rt.st.radio == RadioMode::Rx && channel_.audible_count(oc.receiver) == 0) {
        set_mode(oc.receiver, RadioMode::IdleListen);
      }
      if (oc.intact) {
        trace("rxok", oc.receiver, &frame, frame.payload_id);
        on_decode(oc.receiver, frame);
      } else {
        trace("rxcol", oc.receiver, &frame, frame.payload_id);
        if (frame.kind == FrameKind::Data && frame.dst == oc.receiver) {
          ledger_.data_collisions++;
        }
      }
      if (!hmac()) smac_maybe_sleep(oc.receiver);
    }
  }

  // Source-side continuations once its own transmission leaves the air.
  void after_own_tx(NodeId n, const WireFrame& frame) {
    NodeRuntime& rt = nodes_[n];
    switch (frame.kind) {
      case FrameKind::Data:
        if (!hmac()) {
          // If the ack never comes back, stop the burst and retry next frame.
          const Tick deadline =
              now_ + sc_.air.sifs + sc_.air.data_ack + sc_.air.sifs + 2;
          schedule_timer(n, deadline, kTimerSmacGiveUp, frame.payload_id);
        }
        break;
      case FrameKind::DataAck:
        if (hmac()) {
          if (in_data_period()) set_mode(n, RadioMode::Sleep);
        } else {
          rt.engaged_rx = true;
          schedule_timer(n, now_ + sc_.air.sifs + 2, kTimerSmacIdleCheck);
        }
        break;
      default:
        break;
    }
  }

  void on_decode(NodeId v, const WireFrame& frame) {
    switch (frame.kind) {
      case FrameKind::Atim: decode_atim(v, frame); break;
      case FrameKind::AtimAck: decode_ack(v, frame); break;
      case FrameKind::AtimRes: decode_res(v, frame); break;
      case FrameKind::Data: decode_data(v, frame); break;
      case FrameKind::DataAck: decode_data_ack(v, frame); break;
    }
  }

  void push_ctrl(NodeId v, WireFrame f) {
    nodes_[v].ctrl_outbox.push_back(std::move(f));
    schedule_timer(v, now_ + sc_.air.sifs, kTimerCtrl);
  }

  void decode_atim(NodeId v, const WireFrame& atim) {
    if (atim.dst != v) return;  // proposals teach overhearers nothing
    ledger_.atim_decoded++;
    push_ctrl(v, proto::grant_slots(nodes_[v].st, sc_.frame, atim));
  }

  void decode_ack(NodeId v, const WireFrame& ack) {
    NodeRuntime& rt = nodes_[v];
    if (ack.dst != v) {
      // The grant announces the receiver's claim to the neighborhood.
      for (int s : ack.slot_list) rt.st.ledger.neighborhood_busy.insert(s);
      return;
    }
    if (!rt.pending) return;  // stale ack (request already resolved)
    auto res = proto::confirm_reservation(rt.st, sc_.frame, ack, rt.pending->inbound_slots);
    if (!res) {
      trace("drop", v, &ack, ack.payload_id);
      rt.pending.reset();
      return;
    }
    assign_send_slots(v, *res);
    push_ctrl(v, *res);
  }

  // Bind queued packets (or expected chained arrivals) to confirmed slots.
  void assign_send_slots(NodeId v, const WireFrame& res) {
    NodeRuntime& rt = nodes_[v];
    const PendingRequest& req = *rt.pending;
    if (req.inbound_slots.empty()) {
      std::size_t next = 0;
      for (AppPacket& held : rt.st.tx_queue) {
        if (next >= res.slot_list.size()) break;
        AppPacket& p = packets_[held.id];
        if (!eligible(p) || p.next_hop != req.peer || p.in_flight_slot >= 0) continue;
        const int slot = res.slot_list[next++];
        rt.slot_packet[slot] = p.id;
        p.in_flight_slot = slot;
        held.in_flight_slot = slot;
      }
    } else {
      // k-th confirmed slot carries the packet arriving in the k-th inbound
      // slot (match_after keeps the per-packet ordering).
      for (std::size_t k = 0; k < res.slot_list.size(); ++k) {
        rt.forward_map[req.inbound_slots[k]] = res.slot_list[k];
      }
    }
  }

  void decode_res(NodeId v, const WireFrame& res) {
    NodeRuntime& rt = nodes_[v];
    if (res.dst != v) {
      // The confirmation announces the sender's claim to the neighborhood.
      for (int s : res.slot_list) rt.st.ledger.neighborhood_busy.insert(s);
      return;
    }
    // Receiver commit: confirm listed grants from this peer, free the rest.
    for (auto it = rt.st.ledger.mine.begin(); it != rt.st.ledger.mine.end();) {
      Reservation& r = it->second;
      if (r.dir == SlotDir::Receive && !r.confirmed && r.peer == res.src) {
        if (std::find(res.slot_list.begin(), res.slot_list.end(), it->first) !=
            res.slot_list.end()) {
          r.confirmed = true;
          ++it;
        } else {
          it = rt.st.ledger.mine.erase(it);
        }
      } else {
        ++it;
      }
    }
    trace("res", v, &res, res.payload_id);
    maybe_chain(v, res);
  }

  // Relay continuation: a node that just committed an inbound reservation
  // books the next hop inside the same window, one mini-slot later, subject
  // to the per-window chain budget and the one-request rule.
  void maybe_chain(NodeId v, const WireFrame& res) {
    NodeRuntime& rt = nodes_[v];
    const std::int64_t flow = res.payload_id;
    const NodeId final_dst = flows_[flow].dst;
    if (v == final_dst) return;
    if (rt.st.requested_this_frame || rt.pending) return;
    if (res.chain_depth + 1 >= sc_.hmac.chain_limit) return;  // chain budget spent
    const int next_slot = current_minislot() + 1;
    if (next_slot >= sc_.frame.atim_minislots) return;  // window exhausted

    PendingRequest req;
    req.peer = route(v, final_dst);
    req.flow = flow;
    req.want = static_cast<int>(res.slot_list.size());
    req.chain_depth = res.chain_depth + 1;
    req.inbound_slots = res.slot_list;
    rt.pending = req;
    schedule_timer(v, frame_start_ + static_cast<Tick>(next_slot) * sc_.frame.minislot_len(),
                   kTimerAtim);
  }

  void decode_data(NodeId v, const WireFrame& data) {
    if (data.dst != v) return;
    NodeRuntime& rt = nodes_[v];
    const std::int64_t pid = data.payload_id;

    WireFrame ack;
    ack.kind = FrameKind::DataAck;
    ack.src = v;
    ack.dst = data.src;
    ack.payload_id = pid;
    push_ctrl(v, ack);

    if (!hmac()) rt.engaged_rx = true;
    if (rt.seen.count(pid)) return;  // duplicate after a lost ack
    rt.seen.insert(pid);

    AppPacket& p = packets_[pid];
    p.hops_done++;
    if (v == p.flow_dst) {
      record_delivery(v, p);
      return;
    }
    p.next_hop = route(v, p.flow_dst);
    p.in_flight_slot = -1;
    if (!enqueue(v, pid)) return;

    if (hmac() && in_data_period()) {
      const int inbound_slot =
          static_cast<int>((now_ - frame_start_ - sc_.frame.active_len) / sc_.frame.slot_len);
      const auto fwd = rt.forward_map.find(inbound_slot);
      if (fwd != rt.forward_map.end()) {
        const auto own = rt.st.ledger.mine.find(fwd->second);
        if (own != rt.st.ledger.mine.end() && own->second.dir == SlotDir::Send &&
            own->second.confirmed && p.next_hop == own->second.peer) {
          rt.slot_packet[fwd->second] = pid;
          p.in_flight_slot = fwd->second;
          rt.st.tx_queue.back().in_flight_slot = fwd->second;
        }
      }
    }
  }

  void decode_data_ack(NodeId v, const WireFrame& ack) {
    if (ack.dst != v) return;
    NodeRuntime& rt = nodes_[v];
    const std::int64_t pid = ack.payload_id;
    for (auto it = rt.st.tx_queue.begin(); it != rt.st.tx_queue.end(); ++it) {
      if (it->id == pid) {
        rt.st.tx_queue.erase(it);
        break;
      }
    }
    packets_[pid].in_flight_slot = -1;

    if (hmac()) {
      if (in_data_period()) set_mode(v, RadioMode::Sleep);
      return;
    }
    if (rt.burst_active && rt.awaiting_ack == pid) {
      rt.awaiting_ack = -1;
      rt.burst_pos++;
      if (rt.burst && rt.burst_pos < rt.burst->packet_ids.size()) {
        schedule_timer(v, now_ + sc_.air.sifs, kTimerSmacNext);
      } else {
        rt.burst_active = false;
        smac_maybe_sleep(v);
      }
    }
  }

  void record_delivery(NodeId v, const AppPacket& p) {
    metrics::DeliveryRecord d;
    d.packet = p.id;
    d.src = p.flow_src;
    d.dst = v;
    d.created = p.created;
    d.delivered = now_;
    d.hops = p.hops_done;
    ledger_.deliveries.push_back(d);
    trace("dlv", v, nullptr, p.id);

    const std::int64_t elig_frame = ceil_div(p.created, cycle_);
    const std::int64_t dlv_frame = now_ / cycle_;
    ledger_.hops_total += p.hops_done;
    ledger_.flight_frames_total += dlv_frame - elig_frame + 1;
  }

  // ---- timers --------------------------------------------------------------

  void on_timer(NodeId n, int tag, std::int64_t pid) {
    NodeRuntime& rt = nodes_[n];
    switch (tag) {
      case kTimerAtim: {
        if (!rt.pending || rt.st.requested_this_frame) return;
        if (rt.st.radio == RadioMode::Tx) return;
        WireFrame atim;
        try {
          atim = proto::compose_atim(rt.st, sc_.frame, rt.pending->peer, rt.pending->flow,
                                     rt.pending->want, rt.pending->chain_depth,
                                     rt.pending->inbound_slots);
        } catch (const NoFreeSlotError&) {
          trace("drop", n, nullptr, rt.pending->flow);
          rt.pending.reset();
          return;
        }
        rt.st.requested_this_frame = true;
        begin_tx(n, atim);
        break;
      }
      case kTimerCtrl: {
        if (rt.ctrl_outbox.empty()) return;
        WireFrame f = rt.ctrl_outbox.front();
        rt.ctrl_outbox.pop_front();
        begin_tx(n, f);
        break;
      }
      case kTimerSmacAttempt: {
        if (!rt.burst) return;
        if (channel_.busy_at(n) || rt.st.radio != RadioMode::IdleListen) {
          rt.burst.reset();  // carrier busy: lost this frame's contention
          return;
        }
        rt.burst_active = true;
        rt.burst_pos = 0;
        smac_send_next(n);
        break;
      }
      case kTimerSmacNext:
        if (rt.burst_active) smac_send_next(n);
        break;
      case kTimerSmacGiveUp:
        if (rt.burst_active && rt.awaiting_ack == pid) {
          rt.burst_active = false;
          rt.awaiting_ack = -1;
          smac_maybe_sleep(n);
        }
        break;
      case kTimerSmacIdleCheck:
        rt.engaged_rx = false;
        smac_maybe_sleep(n);
        break;
      default:
        break;
    }
  }

  void smac_send_next(NodeId n) {
    NodeRuntime& rt = nodes_[n];
    const std::int64_t pid = rt.burst->packet_ids[rt.burst_pos];
    WireFrame data;
    data.kind = FrameKind::Data;
    data.src = n;
    data.dst = rt.burst->peer;
    data.payload_id = pid;
    rt.awaiting_ack = pid;
    begin_tx(n, data);
  }

  void smac_maybe_sleep(NodeId n) {
    if (hmac()) return;
    NodeRuntime& rt = nodes_[n];
    if (now_ < frame_start_ + sc_.frame.active_len) return;  // window still open
    if (rt.burst_active || rt.engaged_rx) return;
    if (rt.st.radio == RadioMode::IdleListen && !channel_.busy_at(n)) {
      set_mode(n, RadioMode::Sleep);
    }
  }

  void flush_energy() {
    for (NodeId n = 0; n < topo_.node_count(); ++n) {
      NodeRuntime& rt = nodes_[n];
      ledger_.mode_ticks[n][static_cast<int>(rt.st.radio)] += now_ - rt.last_mode_change;
      rt.last_mode_change = now_;
    }
  }

  // ---- members --------------------------------------------------------------

  Scenario sc_;
  Topology topo_;
  std::vector<TrafficFlow> flows_;
  Channel channel_;
  TraceWriter* trace_;
  std::uint64_t rep_seed_;

  EventQueue queue_;
  Tick now_ = 0;
  bool done_ = false;
  std::int64_t frame_ = 0;
  Tick frame_start_ = 0;
  Tick cycle_ = 0;
  Tick horizon_ = 0;
  std::uint64_t trace_seq_ = 0;

  std::vector<NodeRuntime> nodes_;
  std::vector<AppPacket> packets_;
  std::vector<Event> initial_arrivals_;
  std::map<NodeId, std::vector<NodeId>> routes_;
  metrics::MetricsLedger ledger_;
};

}  // namespace

metrics::MetricsLedger run_replication(const Scenario& scenario, std::uint64_t replication,
                                       TraceWriter* trace) {
  Simulation sim(scenario, replication, trace);
  return sim.run();
}

std::vector<metrics::MetricsLedger> run_scenario(const Scenario& scenario, TraceWriter* trace) {
  std::vector<metrics::MetricsLedger> out;
  out.reserve(scenario.replications);
  for (int r = 0; r < scenario.replications; ++r) {
    out.push_back(run_replication(scenario, static_cast<std::uint64_t>(r), trace));
  }
  return out;
}

}  // namespace macsim
