#include "macsim/scenario.hpp"

#include <fstream>
#include <sstream>

#include "macsim/errors.hpp"

namespace macsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long long n = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + v + "'");
  }
}

TrafficFlow parse_flow(const std::string& v, int line) {
  // "SRC>DST PATTERN", e.g. "0>10 single@uniform", "0>10 burst:8@2.0",
  // "1>0 backlog", "0>10 rate:5".
  const auto gt = v.find('>');
  const auto sp = v.find(' ');
  if (gt == std::string::npos || sp == std::string::npos || gt > sp) {
    throw ParseError(line, "flow must look like 'SRC>DST PATTERN'");
  }
  TrafficFlow f;
  f.src = static_cast<NodeId>(parse_int(trim(v.substr(0, gt)), line));
  f.dst = static_cast<NodeId>(parse_int(trim(v.substr(gt + 1, sp - gt - 1)), line));
  const std::string pat = trim(v.substr(sp + 1));

  auto offset_part = [&](const std::string& s) {
    if (s == "uniform") {
      f.offset_uniform = true;
    } else {
      f.offset_uniform = false;
      f.offset_s = parse_double(s, line);
      if (f.offset_s < 0) throw ParseError(line, "offset must be >= 0");
    }
  };

  if (pat == "backlog") {
    f.pattern = TrafficPattern::Backlog;
  } else if (pat.rfind("single@", 0) == 0) {
    const std::string off = pat.substr(7);
    offset_part(off);
    f.pattern = f.offset_uniform ? TrafficPattern::SingleUniform : TrafficPattern::SingleAt;
  } else if (pat.rfind("burst:", 0) == 0) {
    const auto at = pat.find('@');
    if (at == std::string::npos) throw ParseError(line, "burst needs 'burst:K@OFFSET'");
    f.pattern = TrafficPattern::Burst;
    f.count = static_cast<int>(parse_int(pat.substr(6, at - 6), line));
    if (f.count < 1) throw ParseError(line, "burst size must be >= 1");
    offset_part(pat.substr(at + 1));
  } else if (pat.rfind("rate:", 0) == 0) {
    f.pattern = TrafficPattern::Rate;
    f.rate_pps = parse_double(pat.substr(5), line);
    if (!(f.rate_pps > 0)) throw ParseError(line, "rate must be > 0");
  } else {
    throw ParseError(line, "unknown traffic pattern '" + pat + "'");
  }
  return f;
}

}  // namespace

Topology make_topology(const std::string& spec) {
  auto after = [&](const char* prefix) {
    return spec.substr(std::string(prefix).size());
  };
  try {
    if (spec.rfind("linear:", 0) == 0) return Topology::linear_chain(std::stoi(after("linear:")));
    if (spec.rfind("star:", 0) == 0) return Topology::star(std::stoi(after("star:")));
    if (spec.rfind("ring:", 0) == 0) return Topology::ring(std::stoi(after("ring:")));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("bad topology spec '" + spec + "'");
  }
  if (spec.rfind("edges:", 0) == 0) {
    // "edges:N:0-1,1-2" -> N nodes with the listed undirected links.
    const std::string body = after("edges:");
    const auto colon = body.find(':');
    if (colon == std::string::npos) throw ValidationError("edges spec needs 'edges:N:a-b,...'");
    const int n = std::stoi(body.substr(0, colon));
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::stringstream ss(body.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto dash = item.find('-');
      if (dash == std::string::npos) throw ValidationError("edge must look like 'a-b'");
      edges.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
    }
    return Topology::from_edges(n, edges);
  }
  throw ValidationError("unknown topology spec '" + spec + "'");
}

Topology Scenario::build_topology() const { return make_topology(topology_spec); }

std::vector<TrafficFlow> Scenario::effective_flows() const {
  if (!flows.empty()) return flows;
  TrafficFlow f;
  f.src = 0;
  f.dst = build_topology().node_count() - 1;
  f.pattern = TrafficPattern::SingleUniform;
  return {f};
}

void Scenario::validate() const {
  frame.validate(air);
  energy.validate();
  if (protocol == Protocol::Smac) {
    smac.validate(frame, air);
  } else {
    hmac.validate(frame);
  }
  if (horizon_frames < 2) throw ValidationError("horizon_frames must be >= 2");
  if (replications < 1) throw ValidationError("replications must be >= 1");
  if (warmup_frames < 0) throw ValidationError("warmup_frames must be >= 0");
  if (warmup_frames >= horizon_frames) {
    throw ValidationError("warmup_frames must be < horizon_frames");
  }
  if (queue_capacity < 0) throw ValidationError("queue_capacity must be >= 0");

  const Topology topo = build_topology();
  topo.validate();
  for (const TrafficFlow& f : effective_flows()) {
    if (f.src < 0 || f.src >= topo.node_count() || f.dst < 0 || f.dst >= topo.node_count()) {
      throw ValidationError("flow references a node outside the topology");
    }
    if (f.src == f.dst) throw ValidationError("flow source equals destination");
    if (!topo.path_exists(f.src, f.dst)) {
      throw ValidationError("no path from " + std::to_string(f.src) + " to " +
                            std::to_string(f.dst));
    }
    if (f.pattern == TrafficPattern::Rate && !(f.rate_pps > 0)) {
      throw ValidationError("flow rate must be > 0");
    }
    if (f.pattern == TrafficPattern::Burst && f.count < 1) {
      throw ValidationError("burst size must be >= 1");
    }
    if (!f.offset_uniform && f.offset_s < 0) {
      throw ValidationError("flow offset must be >= 0");
    }
  }
}

std::string Scenario::canonical() const {
  std::ostringstream os;
  os << "protocol=" << protocol_name(protocol) << '\n'
     << "tick=" << ticks.tick_seconds << '\n'
     << "active_len=" << frame.active_len << '\n'
     << "data_slots=" << frame.data_slots << '\n'
     << "slot_len=" << frame.slot_len << '\n'
     << "atim_minislots=" << frame.atim_minislots << '\n'
     << "guard=" << frame.guard << '\n'
     << "atim=" << air.atim << '\n'
     << "atim_ack=" << air.atim_ack << '\n'
     << "atim_res=" << air.atim_res << '\n'
     << "data=" << air.data << '\n'
     << "data_ack=" << air.data_ack << '\n'
     << "sifs=" << air.sifs << '\n'
     << "p_tx=" << energy.p_tx_mw << '\n'
     << "p_rx=" << energy.p_rx_mw << '\n'
     << "p_idle=" << energy.p_idle_mw << '\n'
     << "p_sleep=" << energy.p_sleep_mw << '\n'
     << "cw=" << smac.contention_window << '\n'
     << "n_p_max=" << smac.max_packets_per_frame << '\n'
     << "chain_limit=" << hmac.chain_limit << '\n'
     << "max_want=" << hmac.max_slots_per_request << '\n'
     << "topology=" << topology_spec << '\n'
     << "horizon_frames=" << horizon_frames << '\n'
     << "warmup_frames=" << warmup_frames << '\n'
     << "queue_capacity=" << queue_capacity << '\n';
  for (const TrafficFlow& f : effective_flows()) {
    os << "flow=" << f.src << '>' << f.dst << ' ' << static_cast<int>(f.pattern) << ' '
       << f.offset_uniform << ' ' << f.offset_s << ' ' << f.count << ' ' << f.rate_pps
       << '\n';
  }
  return os.str();
}

std::uint64_t Scenario::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string section = "scenario";
  std::string raw;
  int line = 0;
  bool saw_flow = false;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "scenario" && section != "frame" && section != "airtime" &&
          section != "energy" && section != "topology" && section != "traffic" &&
          section != "smac" && section != "hmac" && section != "sim") {
        throw ParseError(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key=value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "empty key");

    auto dur = [&](const std::string& field) {
      try {
        return sc.ticks.to_ticks(parse_double(val, line), field);
      } catch (const ValidationError& e) {
        throw ParseError(line, e.what());
      }
    };

    if (section == "scenario" || section == "sim") {
      if (key == "protocol") {
        if (val == "hmac") {
          sc.protocol = Protocol::Hmac;
        } else if (val == "smac") {
          sc.protocol = Protocol::Smac;
        } else {
          throw ParseError(line, "protocol must be hmac or smac");
        }
      } else if (key == "horizon_frames") {
        sc.horizon_frames = parse_int(val, line);
      } else if (key == "replications") {
        sc.replications = static_cast<int>(parse_int(val, line));
      } else if (key == "seed") {
        sc.seed = static_cast<std::uint64_t>(parse_int(val, line));
      } else if (key == "warmup_frames") {
        sc.warmup_frames = static_cast<int>(parse_int(val, line));
      } else if (key == "queue_capacity") {
        sc.queue_capacity = static_cast<int>(parse_int(val, line));
      } else if (key == "tick") {
        const double t = parse_double(val, line);
        if (!(t > 0)) throw ParseError(line, "tick must be > 0");
        sc.ticks.tick_seconds = t;
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [" + section + "]");
      }
    } else if (section == "frame") {
      if (key == "active_len") {
        sc.frame.active_len = dur(key);
      } else if (key == "data_slots") {
        sc.frame.data_slots = static_cast<int>(parse_int(val, line));
      } else if (key == "slot_len") {
        sc.frame.slot_len = dur(key);
      } else if (key == "atim_minislots") {
        sc.frame.atim_minislots = static_cast<int>(parse_int(val, line));
      } else if (key == "guard") {
        sc.frame.guard = dur(key);
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [frame]");
      }
    } else if (section == "airtime") {
      if (key == "atim") {
        sc.air.atim = dur(key);
      } else if (key == "atim_ack") {
        sc.air.atim_ack = dur(key);
      } else if (key == "atim_res") {
        sc.air.atim_res = dur(key);
      } else if (key == "data") {
        sc.air.data = dur(key);
      } else if (key == "data_ack") {
        sc.air.data_ack = dur(key);
      } else if (key == "sifs") {
        sc.air.sifs = dur(key);
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [airtime]");
      }
    } else if (section == "energy") {
      if (key == "p_tx") {
        sc.energy.p_tx_mw = parse_double(val, line);
      } else if (key == "p_rx") {
        sc.energy.p_rx_mw = parse_double(val, line);
      } else if (key == "p_idle") {
        sc.energy.p_idle_mw = parse_double(val, line);
      } else if (key == "p_sleep") {
        sc.energy.p_sleep_mw = parse_double(val, line);
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [energy]");
      }
    } else if (section == "topology") {
      if (key == "layout") {
        sc.topology_spec = val;
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [topology]");
      }
    } else if (section == "traffic") {
      if (key == "flow") {
        if (!saw_flow) {
          sc.flows.clear();
          saw_flow = true;
        }
        sc.flows.push_back(parse_flow(val, line));
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [traffic]");
      }
    } else if (section == "smac") {
      if (key == "cw") {
        sc.smac.contention_window = dur(key);
      } else if (key == "n_p_max") {
        sc.smac.max_packets_per_frame = static_cast<int>(parse_int(val, line));
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [smac]");
      }
    } else if (section == "hmac") {
      if (key == "chain_limit") {
        sc.hmac.chain_limit = static_cast<int>(parse_int(val, line));
      } else if (key == "max_want") {
        sc.hmac.max_slots_per_request = static_cast<int>(parse_int(val, line));
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [hmac]");
      }
    }
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace macsim
