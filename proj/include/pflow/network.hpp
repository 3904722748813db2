#pragma once

#include <vector>

#include "pflow/case.hpp"
#include "pflow/crs.hpp"

namespace pflow {

/// PV/PQ index structures over internal bus indices. pvpq is the PV block
/// followed by the PQ block, each ascending. The lookup arrays map a bus
/// index to its position in pvpq / pq with sentinel 0 for non-members;
/// membership is always decided by the equality pvpq[lookup[b]] == b, never
/// by the lookup alone.
struct IndexSets {
    std::vector<index_t> pv;
    std::vector<index_t> pq;
    std::vector<index_t> pvpq;
    std::vector<index_t> pvpq_lookup;
    std::vector<index_t> pq_lookup;
    index_t n_pv = 0;
    index_t n_pq = 0;
    index_t n_pvpq = 0;
};

/// Builds the bus admittance matrix in CRS form from the standard pi branch
/// model. Every diagonal entry is stored explicitly, even when numerically
/// zero, so downstream kernels always find a diagonal slot.
ComplexCRS build_ybus(const ValidatedCase& vc);

IndexSets bus_index_sets(const ValidatedCase& vc);

/// Net scheduled complex injection per internal bus in p.u.:
/// (sum of in-service generation minus load) / base_mva.
std::vector<cplx> scheduled_injections(const ValidatedCase& vc);

}  // namespace pflow
