#pragma once

#include <cstdint>
#include <vector>

#include "macsim/metrics.hpp"
#include "macsim/scenario.hpp"
#include "macsim/trace.hpp"

namespace macsim {

// Executes one replication of a validated scenario. The event trace and the
// resulting ledger are pure functions of (scenario, seed, replication).
// Traffic arrival streams are derived independently of the protocol so that
// both protocols see identical offered load under one base seed.
metrics::MetricsLedger run_replication(const Scenario& scenario, std::uint64_t replication,
                                       TraceWriter* trace = nullptr);

// All replications of the scenario, sequentially (replication index seeds an
// independent stream each time).
std::vector<metrics::MetricsLedger> run_scenario(const Scenario& scenario,
                                                 TraceWriter* trace = nullptr);

}  // namespace macsim
