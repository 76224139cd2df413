#pragma once

#include <optional>
#include <vector>

#include "macsim/config.hpp"
#include "macsim/node.hpp"
#include "macsim/rng.hpp"
#include "macsim/wire.hpp"

namespace macsim::proto {

// Slot-reservation handshake: ATIM (propose) -> ATIM_ACK (grant, receiver
// priority) -> ATIM_RES (confirm + broadcast claim). All functions are
// deterministic given their inputs; the engine owns when they run.

// Picks the `want` lowest-indexed slots the node believes free. When
// `after_slots` is non-empty (a chained relay reservation) the k-th proposed
// slot must come strictly after the k-th inbound slot so a packet received
// in a slot can leave in a later one of the same frame.
// Throws NoFreeSlotError when nothing can be proposed.
WireFrame compose_atim(const NodeState& node, const FrameConfig& fc, NodeId peer,
                       std::int64_t flow, int want, int chain_depth = 0,
                       const std::vector<int>& after_slots = {});

// Receiver side of an ATIM. Grants the intersection of the proposal with the
// receiver's free set when non-empty; otherwise the receiver's own lowest
// free slot (its list has priority). An empty grant is the rejection reply.
// Granted slots are held provisionally in the receiver's ledger until the
// RES confirms (or the window ends).
WireFrame grant_slots(NodeState& receiver, const FrameConfig& fc, const WireFrame& atim);

// Sender side of an ATIM_ACK. Re-checks the grant against the sender's
// current view (grants may have been overheard since the ATIM went out),
// commits the surviving subset and returns the RES to broadcast. Returns
// nullopt when every granted slot became unusable: the reservation aborts
// and queued packets stay queued.
std::optional<WireFrame> confirm_reservation(NodeState& sender, const FrameConfig& fc,
                                             const WireFrame& ack,
                                             const std::vector<int>& after_slots = {});

// Uniform mini-slot draw for the request: pure slotted aloha, no carrier
// sensing inside the active window.
int atim_window_access(Rng& rng, int atim_minislots);

// Greedy order-respecting match: for each element of `after` (ascending),
// the smallest unused candidate strictly greater than it and greater than
// the previous pick. Returns the chosen candidates (may be shorter than
// `after` when candidates run out).
std::vector<int> match_after(const std::vector<int>& candidates, const std::vector<int>& after);

}  // namespace macsim::proto
