#pragma once

// Test-only oracles for the request-contention model. These enumerate or
// sample raw placements of contenders into mini-slots and never touch the
// closed-form implementations they are used to check.

#include <cstdint>
#include <vector>

#include "macsim/rng.hpp"

namespace oracle {

struct ContentionStats {
  double pmf_numerator = 0.0;        // placements with exactly n nodes in slot 0
  double slots_with_n = 0.0;         // mean count of slots holding exactly n nodes
  double collided = 0.0;             // mean number of nodes sharing a slot with someone
  double success = 0.0;              // mean fraction of nodes alone in their slot
};

// Walks every one of the mini_slots^contenders placements.
inline ContentionStats enumerate_contention(int contenders, int mini_slots, int n) {
  std::vector<int> placement(contenders, 0);
  const double total = std::pow(static_cast<double>(mini_slots), contenders);
  ContentionStats out;
  std::vector<int> occupancy(mini_slots, 0);
  for (;;) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (int node = 0; node < contenders; ++node) occupancy[placement[node]]++;
    if (occupancy[0] == n) out.pmf_numerator += 1.0;
    int slots_with_n = 0;
    int collided = 0;
    for (int s = 0; s < mini_slots; ++s) {
      if (occupancy[s] == n) slots_with_n++;
      if (occupancy[s] >= 2) collided += occupancy[s];
    }
    out.slots_with_n += slots_with_n;
    out.collided += collided;
    out.success += static_cast<double>(contenders - collided) / contenders;

    int i = 0;
    while (i < contenders && ++placement[i] == mini_slots) placement[i++] = 0;
    if (i == contenders) break;
  }
  out.pmf_numerator /= total;
  out.slots_with_n /= total;
  out.collided /= total;
  out.success /= total;
  return out;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Samples `trials` random placements and reports mean/stderr of the number of
// collided requests per trial.
inline MonteCarloEstimate sample_collided(int contenders, int mini_slots,
                                          long trials, std::uint64_t seed) {
  macsim::Rng rng(seed);
  std::vector<int> occupancy(mini_slots, 0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long t = 0; t < trials; ++t) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (int node = 0; node < contenders; ++node) {
      occupancy[rng.uniform_int(mini_slots)]++;
    }
    int collided = 0;
    for (int s = 0; s < mini_slots; ++s) {
      if (occupancy[s] >= 2) collided += occupancy[s];
    }
    sum += collided;
    sum_sq += static_cast<double>(collided) * collided;
  }
  MonteCarloEstimate est;
  est.mean = sum / trials;
  const double var = (sum_sq - sum * sum / trials) / (trials - 1);
  est.stderr_ = std::sqrt(var / trials);
  return est;
}

}  // namespace oracle
