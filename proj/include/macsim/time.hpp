#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "macsim/errors.hpp"

namespace macsim {

// Simulation time is kept in integer ticks (default 1 us per tick) so that
// event ordering and energy accounting are exact. Durations in configuration
// files are seconds and must convert to a whole number of ticks.
using Tick = std::int64_t;

struct TickDomain {
  double tick_seconds = 1e-6;

  Tick to_ticks(double seconds, const std::string& field) const {
    const double raw = seconds / tick_seconds;
    const double rounded = std::nearbyint(raw);
    if (std::abs(raw - rounded) > 1e-3) {
      throw ValidationError(field + "=" + std::to_string(seconds) +
                            " is not a whole number of ticks (tick=" +
                            std::to_string(tick_seconds) + " s)");
    }
    if (rounded > 9.2e18 || rounded < -9.2e18) {
      throw ValidationError(field + " overflows the tick counter");
    }
    return static_cast<Tick>(rounded);
  }

  double to_seconds(Tick t) const { return static_cast<double>(t) * tick_seconds; }
};

}  // namespace macsim
