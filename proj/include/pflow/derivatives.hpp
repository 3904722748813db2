#pragma once

#include <span>
#include <vector>

#include "pflow/counters.hpp"
#include "pflow/crs.hpp"
#include "pflow/network.hpp"

namespace pflow {

/// Complex voltage state with cached magnitude, angle and normalized voltage
/// (v_norm = v / vm, unit magnitude).
struct VoltageState {
    std::vector<cplx> v;
    std::vector<double> vm;      // p.u.
    std::vector<double> va;      // radians
    std::vector<cplx> v_norm;

    std::size_t size() const { return v.size(); }

    static VoltageState from_polar(std::vector<double> vm, std::vector<double> va);

    /// Recomputes v and v_norm from the current vm/va entries.
    void refresh();
};

/// Data vectors of the voltage-derivative matrices dVa and dVm over the
/// admittance matrix's sparsity pattern. Entry k corresponds to position k
/// of the admittance values array; no column-index or row-pointer arrays are
/// held, the pattern is shared with Y by construction. ibus is the injected
/// current Y*v and temp the per-row conj(ibus)*v_norm work vector.
struct DerivativePair {
    std::vector<cplx> dva_x;
    std::vector<cplx> dvm_x;
    std::vector<cplx> ibus;
    std::vector<cplx> temp;
};

/// Fused two-pass computation of the derivative data vectors: pass one
/// accumulates the injected current and the products y_ik*v_k / y_ik*v_norm_k,
/// pass two finishes both matrices in place. Visits each stored element of y
/// exactly twice; element visits are recorded in counters when given.
void fused_derivatives(const ComplexCRS& y, const VoltageState& state,
                       DerivativePair& out, OpCounters* counters = nullptr);

DerivativePair fused_derivatives(const ComplexCRS& y, const VoltageState& state,
                                 OpCounters* counters = nullptr);

/// Baseline computation of the same derivative data vectors by composing
/// generic one-traversal-per-operation passes (diagonal scaling, conjugation,
/// sparse addition) plus a final alignment gather onto y's pattern. Produces
/// results identical to fused_derivatives; records at least 11*nnz element
/// visits. Serves as oracle and benchmark baseline.
DerivativePair generic_derivatives(const ComplexCRS& y, const VoltageState& state,
                                   OpCounters* counters = nullptr);

/// S[i] = v[i] * conj((Y*v)[i]).
std::vector<cplx> complex_injections(const ComplexCRS& y, const VoltageState& state);

/// Polar-form power injections evaluated over the stored entries of y:
/// P_i = sum |V_i||V_k| (G_ik cos t_ik + B_ik sin t_ik),
/// Q_i = sum |V_i||V_k| (G_ik sin t_ik - B_ik cos t_ik), t_ik = va_i - va_k.
void polar_injections(const ComplexCRS& y, std::span<const double> vm,
                      std::span<const double> va, std::vector<double>& p,
                      std::vector<double>& q);

/// Power mismatch stacked as [dP over pvpq; dQ over pq].
struct Mismatch {
    std::vector<double> f;
    double max_abs = 0.0;
};

Mismatch mismatch(std::span<const cplx> s_calc, std::span<const cplx> s_sched,
                  const IndexSets& idx);

}  // namespace pflow
