#pragma once

#include <cstdint>

#include "okpi/scenario.hpp"

namespace okpi {

// Seeded random small scenario: 3-6 nodes, 1 service with a 1-3 VNF chain,
// 1-2 endpoints, mixed tight/loose capacities, optional delay/reliability
// targets and step-wise reliability profiles. Deterministic per seed.
Scenario random_scenario(uint64_t seed);

}  // namespace okpi
