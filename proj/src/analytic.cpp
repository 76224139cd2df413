#include "macsim/analytic.hpp"

#include <cmath>
#include <string>

namespace macsim::analytic {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw ValidationError(std::string(name) + " must be > 0, got " + std::to_string(v));
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0)) {
    throw ValidationError(std::string(name) + " must be >= 0, got " + std::to_string(v));
  }
}

void require_at_least(int v, int bound, const char* name) {
  if (v < bound) {
    throw ValidationError(std::string(name) + " must be >= " + std::to_string(bound) +
                          ", got " + std::to_string(v));
  }
}

// Exact binomial coefficient for n <= 64; C(64,32) still fits in 64 bits and
// the 128-bit intermediate keeps the running product from overflowing.
double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  }
  return static_cast<double>(static_cast<unsigned long long>(c));
}

void check_frame_fields(const TimingParams& p) {
  require_positive(p.active_window, "active_window");
  require_positive(p.slot_time, "slot_time");
  require_at_least(p.slot_count, 1, "slot_count");
}

}  // namespace

double cycle_length(const TimingParams& p) {
  check_frame_fields(p);
  return p.active_window + static_cast<double>(p.slot_count) * p.slot_time;
}

double ieee80211_latency(const TimingParams& p) {
  require_at_least(p.hops, 1, "hops");
  require_nonnegative(p.carrier_sense, "carrier_sense");
  require_positive(p.tx_time, "tx_time");
  return static_cast<double>(p.hops) * (p.carrier_sense + p.tx_time);
}

double smac_latency(const TimingParams& p) {
  require_at_least(p.hops, 1, "hops");
  require_nonnegative(p.carrier_sense, "carrier_sense");
  require_positive(p.tx_time, "tx_time");
  const double cycle = cycle_length(p);
  if (!(cycle > p.tx_time)) {
    throw ValidationError("cycle length must exceed tx_time");
  }
  return static_cast<double>(p.hops) * cycle - cycle / 2.0 + p.carrier_sense + p.tx_time;
}

double smac_hop_delay(const TimingParams& p, double cs_prev, double cs_curr) {
  require_nonnegative(cs_prev, "cs_prev");
  require_nonnegative(cs_curr, "cs_curr");
  return cycle_length(p) + cs_curr - cs_prev;
}

double hmac_frame_length(const TimingParams& p) { return cycle_length(p); }

double hmac_latency(const TimingParams& p, FrameRounding rounding) {
  require_at_least(p.hops, 1, "hops");
  require_at_least(p.reserved_hops, 1, "reserved_hops");
  if (p.reserved_hops > p.hops) {
    throw ValidationError("reserved_hops must not exceed hops");
  }
  const double frame = cycle_length(p);
  if (rounding == FrameRounding::whole_frames) {
    // Progress quantized to whole frames: a packet is accounted delivered at
    // the end of the frame in which its reservation chain reaches the sink.
    const int frames = (p.hops + p.reserved_hops - 1) / p.reserved_hops;
    return static_cast<double>(frames) * frame;
  }
  return static_cast<double>(p.hops) * (frame / static_cast<double>(p.reserved_hops));
}

double duty_fraction(const TimingParams& p) {
  const double cycle = cycle_length(p);
  return (static_cast<double>(p.slot_count) * p.slot_time) / cycle;
}

double smac_throughput(const ThroughputParams& tp, const TimingParams& p) {
  require_at_least(tp.packets_per_exchange, 0, "packets_per_exchange");
  require_positive(p.active_window, "active_window");
  require_positive(tp.sleep_time, "sleep_time");
  if (tp.packet_time > 0.0 && tp.sleep_time < tp.packet_time) {
    throw ValidationError("sleep_time must be >= packet_time");
  }
  return static_cast<double>(tp.packets_per_exchange) / (p.active_window + tp.sleep_time);
}

double hmac_throughput(const ThroughputParams& tp, const TimingParams& p) {
  require_at_least(tp.packets_per_exchange, 0, "packets_per_exchange");
  require_at_least(tp.peers_per_frame, 1, "peers_per_frame");
  const double cycle = cycle_length(p);
  const long long demand =
      static_cast<long long>(tp.packets_per_exchange) * tp.peers_per_frame;
  if (demand > p.slot_count) {
    throw CapacityError("requested " + std::to_string(demand) + " data slots but only " +
                        std::to_string(p.slot_count) + " exist per frame");
  }
  return static_cast<double>(demand) / cycle;
}

void validate_contention(const ContentionParams& c) {
  require_at_least(c.contenders, 1, "contenders");
  require_at_least(c.mini_slots, 1, "mini_slots");
  if (c.contenders > 64) {
    throw ValidationError("contenders > 64 would overflow exact binomials; rejected");
  }
}

double collision_slot_pmf(int n, const ContentionParams& c) {
  validate_contention(c);
  if (n < 0 || n > c.contenders) {
    throw DomainError("occupancy " + std::to_string(n) + " outside [0, " +
                      std::to_string(c.contenders) + "]");
  }
  const double q = 1.0 / static_cast<double>(c.mini_slots);
  return binomial(c.contenders, n) * std::pow(q, n) *
         std::pow(1.0 - q, c.contenders - n);
}

double expected_slots_with(int n, const ContentionParams& c) {
  return static_cast<double>(c.mini_slots) * collision_slot_pmf(n, c);
}

double expected_collided(const ContentionParams& c) {
  validate_contention(c);
  const double n = static_cast<double>(c.contenders);
  const double q = 1.0 / static_cast<double>(c.mini_slots);
  return n - n * std::pow(1.0 - q, c.contenders - 1);
}

double success_ratio(const ContentionParams& c) {
  validate_contention(c);
  const double q = 1.0 / static_cast<double>(c.mini_slots);
  return std::pow(1.0 - q, c.contenders - 1);
}

void validate_timing(const TimingParams& p, bool strict_carrier_sense) {
  if (strict_carrier_sense) {
    require_positive(p.carrier_sense, "carrier_sense");
  } else {
    require_nonnegative(p.carrier_sense, "carrier_sense");
  }
  require_positive(p.tx_time, "tx_time");
  check_frame_fields(p);
  require_at_least(p.hops, 1, "hops");
  require_at_least(p.reserved_hops, 1, "reserved_hops");
  if (!(cycle_length(p) > p.tx_time)) {
    throw ValidationError("cycle length must exceed tx_time");
  }
}

}  // namespace macsim::analytic
