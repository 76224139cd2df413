#pragma once

#include <string>

#include "macsim/errors.hpp"
#include "macsim/time.hpp"

namespace macsim {

// Control/data frame airtimes, in ticks.
struct Airtimes {
  Tick atim = 1200;
  Tick atim_ack = 1200;
  Tick atim_res = 1200;
  Tick data = 40000;
  Tick data_ack = 1000;
  Tick sifs = 200;  // turnaround gap between frames of one exchange

  // One complete three-way negotiation, back to back.
  Tick handshake_span() const { return atim + sifs + atim_ack + sifs + atim_res; }
  // One data packet plus its acknowledgment.
  Tick data_exchange_span() const { return data + sifs + data_ack; }
};

// Frame layout shared by both protocols: an active (handshake) window
// followed by the sleep period. The slotted protocol divides the sleep
// period into data_slots equal slots and the active window into
// atim_minislots contention opportunities.
struct FrameConfig {
  Tick active_len = 100000;
  int data_slots = 18;
  Tick slot_len = 50000;
  int atim_minislots = 20;
  Tick guard = 1000;

  Tick cycle_len() const { return active_len + static_cast<Tick>(data_slots) * slot_len; }
  Tick minislot_len() const { return active_len / atim_minislots; }
  Tick slot_offset(int slot) const { return active_len + static_cast<Tick>(slot) * slot_len; }
  double duty_cycle() const {
    return static_cast<double>(active_len) / static_cast<double>(cycle_len());
  }

  void validate(const Airtimes& air) const {
    if (active_len <= 0) throw ValidationError("active_len must be > 0");
    if (data_slots <= 0) throw ValidationError("data_slots must be > 0");
    if (slot_len <= 0) throw ValidationError("slot_len must be > 0");
    if (atim_minislots <= 0) throw ValidationError("atim_minislots must be > 0");
    if (guard < 0) throw ValidationError("guard must be >= 0");
    if (active_len % atim_minislots != 0) {
      throw ValidationError("active_len must divide evenly into atim_minislots mini-slots");
    }
    // A full negotiation must fit inside one mini-slot so that exchanges
    // never spill into a later contention opportunity.
    if (air.handshake_span() > minislot_len()) {
      throw ValidationError("handshake airtime " + std::to_string(air.handshake_span()) +
                            " exceeds mini-slot length " + std::to_string(minislot_len()));
    }
    // Each slot holds one data packet, its ack and the guard time.
    if (air.data_exchange_span() + guard > slot_len) {
      throw ValidationError("slot_len too short for data exchange plus guard");
    }
  }
};

// Radio power draw per mode, milliwatts. The paper publishes no radio
// parameters; these are configuration inputs and every energy acceptance
// check works on ratios.
struct EnergyModel {
  double p_tx_mw = 60.0;
  double p_rx_mw = 45.0;
  double p_idle_mw = 45.0;
  double p_sleep_mw = 0.09;

  void validate() const {
    if (!(p_tx_mw >= p_rx_mw && p_rx_mw >= p_idle_mw && p_idle_mw > p_sleep_mw &&
          p_sleep_mw >= 0.0)) {
      throw ValidationError("energy model requires p_tx >= p_rx >= p_idle > p_sleep >= 0");
    }
  }
};

// Contention baseline: backoff drawn uniformly over contention_window ticks
// at each frame start; the winner moves up to max_packets_per_frame packets
// to a single peer within the frame.
struct SmacParams {
  Tick contention_window = 50000;
  int max_packets_per_frame = 18;

  void validate(const FrameConfig& fc, const Airtimes& air) const {
    if (contention_window <= 0) throw ValidationError("contention_window must be > 0");
    if (contention_window > fc.active_len) {
      throw ValidationError("contention_window must fit inside the active window");
    }
    if (max_packets_per_frame <= 0) {
      throw ValidationError("max_packets_per_frame must be > 0");
    }
    const Tick burst = contention_window +
                       static_cast<Tick>(max_packets_per_frame) *
                           (air.data_exchange_span() + air.sifs);
    if (burst > fc.cycle_len()) {
      throw ValidationError("a maximal burst would not finish within one cycle");
    }
  }
};

// Slot-reservation protocol knobs. chain_limit caps how many hops a single
// packet may advance per frame through chained in-window reservations; the
// active window and mini-slot supply still bound the chain from above.
struct HmacParams {
  int chain_limit = 2;
  int max_slots_per_request = 0;  // 0 = the whole slot budget

  int effective_max_want(const FrameConfig& fc) const {
    return max_slots_per_request == 0 ? fc.data_slots : max_slots_per_request;
  }

  void validate(const FrameConfig& fc) const {
    if (chain_limit < 1) throw ValidationError("chain_limit must be >= 1");
    if (max_slots_per_request < 0 || max_slots_per_request > fc.data_slots) {
      throw ValidationError("max_slots_per_request must be in [0, data_slots]");
    }
  }
};

}  // namespace macsim
