#pragma once

#include <cstdint>

#include "pflow/case.hpp"

namespace pflow {

/// Deterministic synthetic grid generator for scaling studies and test
/// fixtures: a random spanning tree plus extra random edges up to the target
/// average degree. Bus 1 is the slack; a pv_fraction share of the remaining
/// buses become PV buses with vg = 1.0. Loads are light (uniform [0.1, 1.0]
/// MW-scale) so a flat start converges; if a check solve diverges the loads
/// are reduced by 20% and the solve retried, up to five times.
Case synth_grid(int n_bus, double avg_degree, double pv_fraction, std::uint64_t seed);

}  // namespace pflow
