#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "macsim/time.hpp"
#include "macsim/wire.hpp"

namespace macsim {

enum class RadioMode : std::uint8_t { Sleep, IdleListen, Rx, Tx };

inline const char* radio_mode_name(RadioMode m) {
  switch (m) {
    case RadioMode::Sleep: return "sleep";
    case RadioMode::IdleListen: return "idle";
    case RadioMode::Rx: return "rx";
    case RadioMode::Tx: return "tx";
  }
  return "?";
}

// One application packet travelling hop by hop toward flow_dst.
struct AppPacket {
  std::int64_t id = -1;
  std::int64_t flow = -1;
  NodeId flow_src = kNoNode;
  NodeId flow_dst = kNoNode;
  NodeId next_hop = kNoNode;  // toward flow_dst from the current holder
  Tick created = 0;
  int hops_done = 0;
  // Slot the packet is committed to in the current frame; -1 when queued.
  int in_flight_slot = -1;
};

enum class SlotDir : std::uint8_t { Send, Receive };

struct Reservation {
  NodeId peer = kNoNode;
  SlotDir dir = SlotDir::Send;
  bool confirmed = false;  // receivers hold grants provisionally until the RES
};

// Per-frame view of the data slots: `mine` holds this node's reservations,
// `neighborhood_busy` the slots overheard as taken nearby. Cleared at every
// frame boundary; reservations never outlive a frame.
struct SlotLedger {
  std::map<int, Reservation> mine;
  std::set<int> neighborhood_busy;
  std::int64_t epoch = -1;

  void reset(std::int64_t frame) {
    mine.clear();
    neighborhood_busy.clear();
    epoch = frame;
  }

  bool slot_free(int slot) const {
    return mine.find(slot) == mine.end() && neighborhood_busy.find(slot) == neighborhood_busy.end();
  }

  std::vector<int> free_slots(int data_slots) const {
    std::vector<int> out;
    for (int s = 0; s < data_slots; ++s) {
      if (slot_free(s)) out.push_back(s);
    }
    return out;
  }
};

// Protocol-visible state of one node. Advanced only by the engine's event
// loop; nodes influence each other exclusively through transmitted frames.
struct NodeState {
  NodeId id = kNoNode;
  std::deque<AppPacket> tx_queue;
  SlotLedger ledger;
  RadioMode radio = RadioMode::Sleep;
  bool requested_this_frame = false;  // at most one ATIM request per frame
  bool backlogged = false;            // traffic source keeps the queue non-empty
  NodeId backlog_dst = kNoNode;
};

}  // namespace macsim
