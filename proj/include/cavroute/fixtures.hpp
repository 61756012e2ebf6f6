#pragma once

#include <cstdint>
#include <vector>

#include "cavroute/types.hpp"

namespace cavroute {

struct Fixture {
  Network net;
  std::vector<ODPair> trips;
};

/// The 4-node, 5-link Braess network with custom travel-time functions
/// t1 = t5 = x/100, t2 = t3 = 45, t4 = 0 (minutes, x in veh/hr), link
/// lengths (30.5, 30.5, 30.5, 0, 30.5) miles, and 4000 veh/hr from node 1
/// to node 4.
Fixture braess_fixture();

/// Seeded synthetic 4x4 grid (16 nodes, 48 directed links) with BPR links
/// and 8 O-D pairs. Capacities, lengths, and demands are drawn from the
/// seed; free-flow time is consistent with a 60 mph free-flow speed so
/// l = t0 holds numerically.
Fixture grid_fixture(std::uint64_t seed);

}  // namespace cavroute
