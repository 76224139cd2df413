#pragma once

#include <stdexcept>
#include <cstdint>
#include <queue>
#include <vector>

#include "macsim/time.hpp"
#include "macsim/wire.hpp"

namespace macsim {

enum class EventKind : std::uint8_t {
  FrameBoundary,
  WindowEdge,
  SlotEdge,
  TxEnd,
  PacketArrival,
  Timer,
};

// Totally ordered by (time, seq); seq is assigned at scheduling time so two
// events never compare equal and replays are exact.
struct Event {
  Tick time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Timer;
  NodeId subject = kNoNode;
  int a = 0;  // slot index, timer tag, frame number ... kind-specific
  std::uint64_t tx_id = 0;
  std::int64_t packet_id = -1;
};

class EventQueue {
 public:
  void schedule(Tick now, Event e) {
    if (e.time < now) {
      throw std::logic_error("event scheduled into the past");
    }
    e.seq = next_seq_++;
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }

  bool empty() const { return heap_.empty(); }

  Event pop() {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event e = heap_.back();
    heap_.pop_back();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.time != y.time) return x.time > y.time;
      return x.seq > y.seq;
    }
  };
  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace macsim
