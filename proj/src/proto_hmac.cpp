#include "macsim/proto/hmac.hpp"

#include <algorithm>

#include "macsim/errors.hpp"

namespace macsim::proto {

std::vector<int> match_after(const std::vector<int>& candidates, const std::vector<int>& after) {
  std::vector<int> chosen;
  int floor_excl = -1;
  auto it = candidates.begin();
  for (int inbound : after) {
    const int bound = std::max(inbound, floor_excl);
    while (it != candidates.end() && *it <= bound) ++it;
    if (it == candidates.end()) break;
    chosen.push_back(*it);
    floor_excl = *it;
    ++it;
  }
  return chosen;
}

WireFrame compose_atim(const NodeState& node, const FrameConfig& fc, NodeId peer,
                       std::int64_t flow, int want, int chain_depth,
                       const std::vector<int>& after_slots) {
  if (want < 1) throw ValidationError("compose_atim: want must be >= 1");
  const std::vector<int> free = node.ledger.free_slots(fc.data_slots);

  std::vector<int> proposal;
  if (after_slots.empty()) {
    const int take = std::min<int>(want, static_cast<int>(free.size()));
    proposal.assign(free.begin(), free.begin() + take);
  } else {
    proposal = match_after(free, after_slots);
    if (static_cast<int>(proposal.size()) > want) proposal.resize(want);
  }
  if (proposal.empty()) {
    throw NoFreeSlotError("no free slot to propose this frame");
  }

  WireFrame atim;
  atim.kind = FrameKind::Atim;
  atim.src = node.id;
  atim.dst = peer;
  atim.slot_list = std::move(proposal);
  atim.payload_id = flow;
  atim.chain_depth = chain_depth;
  return atim;
}

WireFrame grant_slots(NodeState& receiver, const FrameConfig& fc, const WireFrame& atim) {
  if (atim.kind != FrameKind::Atim || atim.dst != receiver.id) {
    throw ValidationError("grant_slots: frame is not an ATIM addressed to this node");
  }
  const std::vector<int> free = receiver.ledger.free_slots(fc.data_slots);

  std::vector<int> grant;
  std::set_intersection(atim.slot_list.begin(), atim.slot_list.end(), free.begin(),
                        free.end(), std::back_inserter(grant));
  if (grant.empty() && !free.empty()) {
    grant.push_back(free.front());  // receiver's list wins over the proposal
  }
  for (int s : grant) {
    receiver.ledger.mine[s] = Reservation{atim.src, SlotDir::Receive, /*confirmed=*/false};
  }

  WireFrame ack;
  ack.kind = FrameKind::AtimAck;
  ack.src = receiver.id;
  ack.dst = atim.src;
  ack.slot_list = std::move(grant);  // empty list = rejection
  ack.payload_id = atim.payload_id;
  ack.chain_depth = atim.chain_depth;
  return ack;
}

std::optional<WireFrame> confirm_reservation(NodeState& sender, const FrameConfig& fc,
                                             const WireFrame& ack,
                                             const std::vector<int>& after_slots) {
  if (ack.kind != FrameKind::AtimAck || ack.dst != sender.id) {
    throw ValidationError("confirm_reservation: frame is not an ATIM_ACK for this node");
  }
  std::vector<int> usable;
  for (int s : ack.slot_list) {
    if (s >= 0 && s < fc.data_slots && sender.ledger.slot_free(s)) usable.push_back(s);
  }
  std::vector<int> confirmed =
      after_slots.empty() ? usable : match_after(usable, after_slots);
  if (confirmed.empty()) return std::nullopt;

  for (int s : confirmed) {
    sender.ledger.mine[s] = Reservation{ack.src, SlotDir::Send, /*confirmed=*/true};
  }

  WireFrame res;
  res.kind = FrameKind::AtimRes;
  res.src = sender.id;
  res.dst = ack.src;
  res.slot_list = std::move(confirmed);
  res.payload_id = ack.payload_id;
  res.chain_depth = ack.chain_depth;
  return res;
}

int atim_window_access(Rng& rng, int atim_minislots) {
  return rng.uniform_int(atim_minislots);
}

}  // namespace macsim::proto
