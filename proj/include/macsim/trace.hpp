#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "macsim/time.hpp"
#include "macsim/wire.hpp"

namespace macsim {

// Line-oriented event trace, byte-stable across runs with the same
// (scenario, seed). Field order:
//   tick seq kind subject frame-kind src dst slots payload
// '-' fills fields that do not apply to an event.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(&out) {}

  void line(Tick tick, std::uint64_t seq, const char* kind, NodeId subject,
            const WireFrame* frame, std::int64_t payload) {
    *out_ << tick << ' ' << seq << ' ' << kind << ' ' << subject << ' ';
    if (frame) {
      *out_ << frame_kind_name(frame->kind) << ' ' << frame->src << ' ' << frame->dst
            << ' ' << slot_list_string(frame->slot_list);
    } else {
      *out_ << "- -1 -1 -";
    }
    *out_ << ' ' << payload << '\n';
  }

 private:
  std::ostream* out_;
};

}  // namespace macsim
