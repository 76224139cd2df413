#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "macsim/config.hpp"
#include "macsim/time.hpp"
#include "macsim/topology.hpp"

namespace macsim {

enum class Protocol : std::uint8_t { Hmac, Smac };

inline const char* protocol_name(Protocol p) {
  return p == Protocol::Hmac ? "hmac" : "smac";
}

enum class TrafficPattern : std::uint8_t {
  SingleUniform,  // one packet, creation offset uniform within the first
                  // post-warm-up frame
  SingleAt,       // one packet at a fixed offset (seconds from t=0)
  Burst,          // `count` packets at a fixed or uniform offset
  Rate,           // periodic arrivals at rate_pps from the warm-up edge on
  Backlog,        // the source queue never runs empty
};

struct TrafficFlow {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  TrafficPattern pattern = TrafficPattern::SingleUniform;
  double offset_s = 0.0;       // SingleAt / Burst fixed offset
  bool offset_uniform = true;  // Burst: draw the offset uniformly instead
  int count = 1;               // Burst size
  double rate_pps = 0.0;       // Rate pattern
};

// A complete, validatable experiment description. Everything the engine
// needs; identical (scenario, seed) pairs replay bit-identically.
struct Scenario {
  Protocol protocol = Protocol::Hmac;
  TickDomain ticks;
  FrameConfig frame;
  Airtimes air;
  EnergyModel energy;
  SmacParams smac;
  HmacParams hmac;

  std::string topology_spec = "linear:10";
  std::vector<TrafficFlow> flows;  // empty -> default single uniform flow 0 -> last

  std::int64_t horizon_frames = 30;
  int replications = 30;
  std::uint64_t seed = 1;
  int warmup_frames = 1;
  int queue_capacity = 0;  // per-node packet queue bound; 0 = unbounded

  Topology build_topology() const;
  // Flows with defaults applied (never empty).
  std::vector<TrafficFlow> effective_flows() const;

  void validate() const;
  std::string canonical() const;   // deterministic serialization
  std::uint64_t digest() const;    // FNV-1a over canonical()
};

// Parses the documented line-oriented `key=value` format with [section]
// headers. Unknown sections/keys and malformed values raise ParseError with
// the line number; an empty stream yields the all-defaults scenario.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

Topology make_topology(const std::string& spec);

}  // namespace macsim
