#include "macsim/proto/smac.hpp"

namespace macsim::proto {

std::optional<BurstPlan> plan_frame_burst(const NodeState& node, const SmacParams& sp,
                                          Tick frame_start, Rng& rng) {
  BurstPlan plan;
  for (const AppPacket& p : node.tx_queue) {
    if (p.created > frame_start) continue;
    if (plan.peer == kNoNode) plan.peer = p.next_hop;
    if (p.next_hop != plan.peer) continue;  // one peer per frame
    plan.packet_ids.push_back(p.id);
    if (static_cast<int>(plan.packet_ids.size()) >= sp.max_packets_per_frame) break;
  }
  if (plan.packet_ids.empty()) return std::nullopt;
  plan.backoff = rng.uniform_tick(sp.contention_window);
  return plan;
}

}  // namespace macsim::proto
