#pragma once

#include "pflow/counters.hpp"
#include "pflow/crs.hpp"
#include "pflow/derivatives.hpp"
#include "pflow/network.hpp"

namespace pflow {

/// Assembles the real Jacobian directly in CRS form from the derivative data
/// vectors. Rows 0..n_pvpq carry [J11 | J12], the remaining n_pq rows carry
/// [J21 | J22]; columns below n_pvpq address angle variables, columns at or
/// above n_pvpq magnitude variables. Each selected admittance row is
/// traversed once per Jacobian row (n_pvpq + n_pq row traversals in total)
/// and storage is preallocated at the 4*nnz(Y) upper bound, then trimmed.
/// Structural zeros in the derivative data are written anyway, so the
/// Jacobian pattern stays constant across iterations. The out overload
/// reuses the caller's buffers.
void create_jacobian_direct(const DerivativePair& d, const ComplexCRS& y,
                            const IndexSets& idx, RealCRS& out,
                            OpCounters* counters = nullptr);

RealCRS create_jacobian_direct(const DerivativePair& d, const ComplexCRS& y,
                               const IndexSets& idx, OpCounters* counters = nullptr);

/// Oracle path: expands the derivative data vectors to full CRS matrices on
/// y's pattern, selects J11 = Re(dVa[pvpq,pvpq]), J12 = Re(dVm[pvpq,pq]),
/// J21 = Im(dVa[pq,pvpq]), J22 = Im(dVm[pq,pq]) via generic submatrix
/// extraction and stacks the blocks. Pattern and values match the direct path.
RealCRS create_jacobian_generic(const DerivativePair& d, const ComplexCRS& y,
                                const IndexSets& idx, OpCounters* counters = nullptr);

}  // namespace pflow
