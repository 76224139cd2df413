#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macsim/config.hpp"
#include "macsim/time.hpp"

namespace macsim {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

enum class FrameKind : std::uint8_t { Atim, AtimAck, AtimRes, Data, DataAck };

inline const char* frame_kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::Atim: return "ATIM";
    case FrameKind::AtimAck: return "ACK";
    case FrameKind::AtimRes: return "RES";
    case FrameKind::Data: return "DATA";
    case FrameKind::DataAck: return "DACK";
  }
  return "?";
}

// One over-the-air frame. slot_list carries proposed slots in an ATIM,
// granted slots in an ATIM_ACK (empty grant = rejection) and the confirmed
// subset in an ATIM_RES; it is empty for DATA/DATA_ACK. payload_id names the
// packet for DATA frames and the flow for handshake frames so exchanges can
// be traced end to end. chain_depth counts hops already reserved for the
// flow earlier in the same active window.
struct WireFrame {
  FrameKind kind = FrameKind::Data;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  std::vector<int> slot_list;
  std::int64_t payload_id = -1;
  int chain_depth = 0;

  Tick airtime(const Airtimes& air) const {
    switch (kind) {
      case FrameKind::Atim: return air.atim;
      case FrameKind::AtimAck: return air.atim_ack;
      case FrameKind::AtimRes: return air.atim_res;
      case FrameKind::Data: return air.data;
      case FrameKind::DataAck: return air.data_ack;
    }
    return 0;
  }
};

inline std::string slot_list_string(const std::vector<int>& slots) {
  if (slots.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(slots[i]);
  }
  return out;
}

}  // namespace macsim
