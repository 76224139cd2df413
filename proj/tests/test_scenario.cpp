#include <sstream>

#include "doctest.h"
#include "macsim/scenario.hpp"

using namespace macsim;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is);
}

int parse_error_line(const std::string& text) {
  std::istringstream is(text);
  try {
    parse_scenario(is);
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("empty file yields the built-in preset") {
  const Scenario sc = parse("");
  CHECK(sc.protocol == Protocol::Hmac);
  CHECK(sc.topology_spec == "linear:10");
  CHECK(sc.build_topology().node_count() == 11);
  CHECK(sc.frame.data_slots == 18);
  CHECK(sc.frame.atim_minislots == 20);
  CHECK(sc.frame.cycle_len() == 1'000'000);                 // 1 s at 1 us ticks
  CHECK(sc.frame.active_len == 2 * sc.frame.slot_len);      // 2 slots of handshake budget
  CHECK(sc.frame.duty_cycle() == doctest::Approx(0.1));
  CHECK(sc.horizon_frames == 30);
  CHECK(sc.replications == 30);

  const auto flows = sc.effective_flows();
  REQUIRE(flows.size() == 1);
  CHECK(flows[0].src == 0);
  CHECK(flows[0].dst == 10);
  CHECK(flows[0].pattern == TrafficPattern::SingleUniform);
}

TEST_CASE("topology, flows and overrides parse") {
  const Scenario sc = parse(
      "[scenario]\n"
      "protocol=smac\n"
      "seed=99\n"
      "horizon_frames=8\n"
      "replications=3\n"
      "[topology]\n"
      "layout=linear:3\n"
      "[traffic]\n"
      "flow=0>3 burst:5@2.0\n"
      "flow=3>0 backlog\n"
      "[smac]\n"
      "cw=0.02\n");
  CHECK(sc.protocol == Protocol::Smac);
  CHECK(sc.seed == 99);
  CHECK(sc.build_topology().node_count() == 4);
  REQUIRE(sc.flows.size() == 2);
  CHECK(sc.flows[0].pattern == TrafficPattern::Burst);
  CHECK(sc.flows[0].count == 5);
  CHECK_FALSE(sc.flows[0].offset_uniform);
  CHECK(sc.flows[0].offset_s == doctest::Approx(2.0));
  CHECK(sc.flows[1].pattern == TrafficPattern::Backlog);
  CHECK(sc.smac.contention_window == 20'000);
}

TEST_CASE("validation failures name the problem") {
  CHECK_THROWS_AS(parse("[frame]\ndata_slots=0\n"), ValidationError);
  CHECK_THROWS_AS(parse("[scenario]\nhorizon_frames=1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[traffic]\nflow=0>99 backlog\n"), ValidationError);
  CHECK_THROWS_AS(parse("[traffic]\nflow=3>3 backlog\n"), ValidationError);
  // handshake no longer fits a mini-slot when the window is split 40 ways
  CHECK_THROWS_AS(parse("[frame]\natim_minislots=40\n"), ValidationError);
  // energy ordering
  CHECK_THROWS_AS(parse("[energy]\np_sleep=50\n"), ValidationError);
  // contention window beyond the active window (checked for the active protocol)
  CHECK_THROWS_AS(parse("[scenario]\nprotocol=smac\n[smac]\ncw=0.2\n"), ValidationError);
  // durations must land on whole ticks
  CHECK_THROWS_AS(parse("[frame]\nslot_len=0.0000005\n"), std::runtime_error);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error_line("[scenario]\nprotocol=hmac\nbogus_key=1\n") == 3);
  CHECK(parse_error_line("[nonsense]\n") == 1);
  CHECK(parse_error_line("[frame]\nslot_len=abc\n") == 2);
  CHECK(parse_error_line("[traffic]\nflow=0>1 warp:9\n") == 2);
  CHECK(parse_error_line("no_equals_sign\n") == 1);
}

TEST_CASE("comments and blank lines are ignored") {
  const Scenario sc = parse(
      "# latency experiment\n"
      "\n"
      "[scenario]\n"
      "  seed = 7\n"
      "# trailing comment line\n");
  CHECK(sc.seed == 7);
}

TEST_CASE("digest distinguishes scenarios and ignores nothing material") {
  const Scenario a = parse("[scenario]\nseed=1\n");
  const Scenario b = parse("[scenario]\nseed=2\n");
  // seed is not part of the canonical config: same experiment, different stream
  CHECK(a.digest() == b.digest());

  const Scenario c = parse("[frame]\ndata_slots=17\n");
  CHECK(a.digest() != c.digest());
  const Scenario d = parse("[scenario]\nprotocol=smac\n");
  CHECK(a.digest() != d.digest());
}

TEST_CASE("explicit edge-list topologies") {
  const Scenario sc = parse("[topology]\nlayout=edges:4:0-1,1-2,2-3\n[traffic]\nflow=0>3 backlog\n");
  const Topology t = sc.build_topology();
  CHECK(t.node_count() == 4);
  CHECK(t.linked(1, 2));
  CHECK_FALSE(t.linked(0, 3));
  CHECK(t.is_linear_chain());
  CHECK(make_topology("star:4").node_count() == 5);
  CHECK_FALSE(make_topology("star:4").is_linear_chain());
  CHECK_THROWS_AS(make_topology("grid:3"), ValidationError);
}
