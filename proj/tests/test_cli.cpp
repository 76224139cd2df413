#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "macsim/analytic.hpp"
#include "macsim/presets.hpp"

using namespace macsim;
namespace fs = std::filesystem;

namespace {

Scenario light_chain(Protocol proto, int hops) {
  Scenario sc;
  sc.protocol = proto;
  sc.topology_spec = "linear:" + std::to_string(hops);
  sc.horizon_frames = 16;
  sc.replications = 40;
  TrafficFlow f;
  f.src = 0;
  f.dst = hops;
  f.pattern = TrafficPattern::SingleUniform;
  sc.flows = {f};
  return sc;
}

const presets::CompareRow* find_row(const std::vector<presets::CompareRow>& rows,
                                    const std::string& metric) {
  for (const auto& r : rows) {
    if (r.metric == metric) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("compare: light-load chain latency sits near the closed forms") {
  const auto smac_rows = presets::compare_scenario(light_chain(Protocol::Smac, 10));
  const auto* lat = find_row(smac_rows, "mean_latency_s");
  REQUIRE(lat != nullptr);
  REQUIRE(lat->rel_error.has_value());
  CHECK(*lat->rel_error < 0.05);

  // chain reservations disabled reduce the slotted MAC to one hop per frame
  Scenario h = light_chain(Protocol::Hmac, 10);
  h.hmac.chain_limit = 1;
  const auto hmac_rows = presets::compare_scenario(h);
  const auto* hlat = find_row(hmac_rows, "mean_latency_s");
  REQUIRE(hlat != nullptr);
  REQUIRE(hlat->analytic.has_value());
  CHECK(*hlat->analytic == doctest::Approx(10.0));  // hops * frame / 1
  CHECK(*hlat->rel_error < 0.05);
}

TEST_CASE("compare: configurations outside the formulas get a notice, not a fail") {
  Scenario ring;
  ring.protocol = Protocol::Hmac;
  ring.topology_spec = "ring:6";
  ring.replications = 2;
  TrafficFlow f;
  f.src = 0;
  f.dst = 3;
  f.pattern = TrafficPattern::SingleUniform;
  ring.flows = {f};

  const auto rows = presets::compare_scenario(ring);
  const auto* lat = find_row(rows, "mean_latency_s");
  REQUIRE(lat != nullptr);
  CHECK_FALSE(lat->analytic.has_value());
  CHECK_FALSE(lat->note.empty());
}

TEST_CASE("compare: one-hop burst throughput and star success ratio") {
  Scenario one_hop;
  one_hop.protocol = Protocol::Hmac;
  one_hop.topology_spec = "linear:1";
  one_hop.replications = 10;
  TrafficFlow f;
  f.src = 0;
  f.dst = 1;
  f.pattern = TrafficPattern::Burst;
  f.count = 4;
  f.offset_uniform = true;
  one_hop.flows = {f};
  const auto rows = presets::compare_scenario(one_hop);
  const auto* thr = find_row(rows, "throughput_ppf");
  REQUIRE(thr != nullptr);
  REQUIRE(thr->analytic.has_value());
  CHECK(*thr->analytic == doctest::Approx(4.0));
  CHECK(*thr->rel_error < 0.01);

  Scenario star;
  star.protocol = Protocol::Hmac;
  star.topology_spec = "star:5";
  star.replications = 12;
  star.horizon_frames = 30;
  star.flows.clear();
  for (int leaf = 1; leaf <= 5; ++leaf) {
    TrafficFlow b;
    b.src = leaf;
    b.dst = 0;
    b.pattern = TrafficPattern::Backlog;
    star.flows.push_back(b);
  }
  const auto srows = presets::compare_scenario(star);
  const auto* ratio = find_row(srows, "success_ratio");
  REQUIRE(ratio != nullptr);
  REQUIRE(ratio->analytic.has_value());
  CHECK(*ratio->analytic ==
        doctest::Approx(analytic::success_ratio({5, star.frame.atim_minislots})));
  CHECK(*ratio->rel_error < 0.1);
}

TEST_CASE("preset CSV analytic columns reproduce from the closed forms") {
  presets::PresetOptions opt;
  opt.out_dir = (fs::temp_directory_path() / "macsim_csv_check").string();
  opt.replications = 3;
  const std::string path = presets::run_preset("fig6", opt);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  int checked = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string var, value, proto, metric, mean, se, n, an;
    std::getline(ss, var, ',');
    std::getline(ss, value, ',');
    std::getline(ss, proto, ',');
    std::getline(ss, metric, ',');
    std::getline(ss, mean, ',');
    std::getline(ss, se, ',');
    std::getline(ss, n, ',');
    std::getline(ss, an, ',');
    if (metric != "mean_latency_s") continue;
    REQUIRE(!an.empty());
    const int hops = std::stoi(value);
    analytic::TimingParams tp;
    tp.carrier_sense = 0.025;
    tp.tx_time = 0.04;
    tp.active_window = 0.1;
    tp.slot_time = 0.05;
    tp.slot_count = 18;
    tp.hops = hops;
    tp.reserved_hops = std::min(2, hops);
    const double expected = proto == "hmac" ? analytic::hmac_latency(tp)
                                            : analytic::smac_latency(tp);
    CHECK(std::stod(an) == doctest::Approx(expected).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked == 20);  // 10 hop counts x 2 protocols
  std::error_code ec;
  fs::remove_all(opt.out_dir, ec);
}

TEST_CASE("unknown preset names are rejected") {
  presets::PresetOptions opt;
  CHECK_THROWS_AS(presets::run_preset("fig99", opt), ValidationError);
  CHECK(presets::is_preset_name("fig5"));
  CHECK_FALSE(presets::is_preset_name("fig9"));
}
