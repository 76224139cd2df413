#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "macsim/config.hpp"
#include "macsim/node.hpp"
#include "macsim/rng.hpp"

namespace macsim::proto {

// One frame's contention decision for the unslotted duty-cycled baseline:
// a uniform backoff inside the contention window and the batch of packets
// (all sharing one next hop) to move if the channel is won. Losing the
// channel is a normal outcome handled by the engine's carrier sense.
struct BurstPlan {
  Tick backoff = 0;
  NodeId peer = kNoNode;
  std::vector<std::int64_t> packet_ids;
};

// Packets are eligible once created at or before the frame start; the batch
// is the FIFO prefix of eligible packets sharing the head packet's next hop,
// capped by max_packets_per_frame (one peer per frame).
std::optional<BurstPlan> plan_frame_burst(const NodeState& node, const SmacParams& sp,
                                          Tick frame_start, Rng& rng);

}  // namespace macsim::proto
