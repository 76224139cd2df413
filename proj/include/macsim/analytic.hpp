#pragma once

#include "macsim/errors.hpp"

namespace macsim::analytic {

// Closed-form latency/throughput/contention models for duty-cycled MAC
// protocols over a linear multihop path. All quantities are seconds unless
// noted; every function is pure and safe to call concurrently.

struct TimingParams {
  double carrier_sense = 0.0;  // mean backoff delay before a transmission
  double tx_time = 0.0;        // airtime of one data packet
  double active_window = 0.0;  // awake/handshake portion of a cycle
  double slot_time = 0.0;      // length of one sleep slot
  int slot_count = 0;          // sleep slots per cycle
  int hops = 1;                // path length in hops
  int reserved_hops = 1;       // hops a packet advances per cycle under slot chaining
};

// Cycle length: active window plus the slotted (or unslotted) sleep period.
double cycle_length(const TimingParams& p);

// Contention-based MAC with no sleep schedule: hops * (carrier_sense + tx_time).
double ieee80211_latency(const TimingParams& p);

// Duty-cycled contention MAC, one hop of progress per cycle:
//   hops * T - T/2 + carrier_sense + tx_time   with T = cycle_length(p).
double smac_latency(const TimingParams& p);

// Per-hop delay with explicit backoff samples at the previous and current
// hop: T + cs_curr - cs_prev. Exposed so the telescoping sum behind
// smac_latency can be checked independently.
double smac_hop_delay(const TimingParams& p, double cs_prev, double cs_curr);

// Slotted-sleep frame length (same formula as cycle_length; the slotted
// protocol names it separately because slot_count is load-bearing there).
double hmac_frame_length(const TimingParams& p);

enum class FrameRounding {
  none,          // hops * (frame / reserved_hops)
  whole_frames,  // quantize progress to whole frames: ceil(hops/reserved_hops) * frame
};

// Slot-reserving MAC latency; slope of the hop/latency line is
// frame_length / reserved_hops.
double hmac_latency(const TimingParams& p, FrameRounding rounding = FrameRounding::none);

// Fraction of a cycle available for data transfer: sleep / (active + sleep).
double duty_fraction(const TimingParams& p);

struct ThroughputParams {
  int packets_per_exchange = 0;  // packets moved across one link per cycle
  int peers_per_frame = 1;       // distinct peers a node serves within one cycle
  double packet_time = 0.0;      // airtime of one packet
  double sleep_time = 0.0;       // total sleep-period length per cycle
};

// One peer per cycle: packets_per_exchange / (active + sleep).
double smac_throughput(const ThroughputParams& tp, const TimingParams& p);

// Up to peers_per_frame peers per cycle, bounded by the slot budget:
// packets_per_exchange * peers_per_frame / (active + slot_count * slot_time).
double hmac_throughput(const ThroughputParams& tp, const TimingParams& p);

struct ContentionParams {
  int contenders = 1;  // nodes competing for the handshake window
  int mini_slots = 1;  // contention opportunities inside the window
};

// P[exactly n of the contenders land in a given mini-slot]:
//   C(N,n) (1/S)^n (1-1/S)^(N-n).
double collision_slot_pmf(int n, const ContentionParams& c);

// Expected number of mini-slots holding exactly n contenders: S * pmf(n).
double expected_slots_with(int n, const ContentionParams& c);

// Expected number of requests lost to collisions: N - N(1-1/S)^(N-1).
double expected_collided(const ContentionParams& c);

// Fraction of requests decoded without collision: (1-1/S)^(N-1).
double success_ratio(const ContentionParams& c);

// Throws ValidationError when any field an operation reads is out of range.
// strict_carrier_sense additionally rejects carrier_sense == 0.
void validate_timing(const TimingParams& p, bool strict_carrier_sense = false);
void validate_contention(const ContentionParams& c);

}  // namespace macsim::analytic
