#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "macsim/time.hpp"
#include "macsim/topology.hpp"
#include "macsim/wire.hpp"

namespace macsim {

// All-or-nothing collision channel with zero propagation delay. A
// transmission occupies the air at every interference neighbor of its source
// for its whole span; a link neighbor decodes it iff no other signal was
// audible there at any point of that span (and, at the protocol layer, iff
// it was listening throughout).
class Channel {
 public:
  explicit Channel(const Topology* topo) : topo_(topo), audible_(topo->node_count()) {}

  struct Outcome {
    NodeId receiver = kNoNode;
    bool intact = false;     // channel-level: sole audible signal for the span
    bool listening = false;  // receiver was listening when the signal began
  };

  // Registers a transmission in the air. `listening(v)` reports whether node
  // v can currently receive (awake and not transmitting).
  template <typename ListeningFn>
  std::uint64_t begin(NodeId src, const WireFrame& frame, Tick start, Tick end,
                      ListeningFn&& listening) {
    const std::uint64_t id = next_id_++;
    active_.emplace(id, Active{frame, src, start, end});
    for (NodeId v : topo_->interference_neighbors(src)) {
      auto& at = audible_[v];
      at.push_back(Entry{id, /*corrupt=*/false, listening(v) && topo_->linked(src, v)});
      if (at.size() >= 2) {
        for (auto& e : at) e.corrupt = true;
      }
    }
    return id;
  }

  // The moment a node keys its own transmitter it stops decoding anything
  // already in the air at its location.
  void jam_receptions_at(NodeId node) {
    for (auto& e : audible_[node]) e.corrupt = true;
  }

  // Removes the transmission and reports the outcome at every link neighbor.
  std::vector<Outcome> finish(std::uint64_t id) {
    const Active tx = active_.at(id);
    active_.erase(id);
    std::vector<Outcome> outcomes;
    for (NodeId v : topo_->interference_neighbors(tx.src)) {
      auto& at = audible_[v];
      for (auto it = at.begin(); it != at.end(); ++it) {
        if (it->id != id) continue;
        if (topo_->linked(tx.src, v)) {
          outcomes.push_back(Outcome{v, !it->corrupt, it->listening});
        }
        at.erase(it);
        break;
      }
    }
    return outcomes;
  }

  const WireFrame& frame_of(std::uint64_t id) const { return active_.at(id).frame; }
  NodeId source_of(std::uint64_t id) const { return active_.at(id).src; }

  int audible_count(NodeId node) const { return static_cast<int>(audible_[node].size()); }
  bool busy_at(NodeId node) const { return !audible_[node].empty(); }

 private:
  struct Active {
    WireFrame frame;
    NodeId src;
    Tick start, end;
  };
  struct Entry {
    std::uint64_t id;
    bool corrupt;
    bool listening;
  };

  const Topology* topo_;
  std::vector<std::vector<Entry>> audible_;
  std::map<std::uint64_t, Active> active_;
  std::uint64_t next_id_ = 1;
};

}  // namespace macsim
