#include "pflow/solver.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "pflow/derivatives.hpp"
#include "pflow/errors.hpp"
#include "pflow/jacobian.hpp"
#include "pflow/lu.hpp"
#include "pflow/network.hpp"

namespace pflow {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

PowerFlowResult newton_raphson(const ValidatedCase& vc, const SolveOptions& opts) {
    if (!(opts.tol > 0.0))
        throw ValidationError("solve options: tol must be positive");
    if (opts.max_iter < 1)
        throw ValidationError("solve options: max_iter must be at least 1");

    const auto t_total = Clock::now();
    const int n = vc.n_bus();

    const ComplexCRS y = build_ybus(vc);
    const IndexSets idx = bus_index_sets(vc);
    const std::vector<cplx> s_sched = scheduled_injections(vc);

    // Initial estimate: flat (vm = 1, va = 0) or the case's stored voltages;
    // either way generator setpoints pin vm at PV and slack buses and the
    // slack keeps its case angle.
    std::vector<double> vm(n, 1.0), va(n, 0.0);
    const double deg = std::numbers::pi / 180.0;
    if (opts.init == InitMode::FromCase) {
        for (int i = 0; i < n; ++i) {
            vm[i] = vc.bus(i).vm;
            va[i] = vc.bus(i).va * deg;
        }
    } else {
        for (int i = 0; i < n; ++i)
            if (vc.bus(i).btype == BusType::Slack) va[i] = vc.bus(i).va * deg;
    }
    for (const auto& g : vc.grid.gens) {
        if (!g.in_service) continue;
        const int b = vc.index_of(g.bus);
        if (vc.bus(b).btype != BusType::PQ) vm[b] = g.vg;
    }

    VoltageState state = VoltageState::from_polar(std::move(vm), std::move(va));

    PowerFlowResult res;
    DerivativePair deriv;
    RealCRS jac;

    for (int iter = 0;; ++iter) {
        auto t0 = Clock::now();
        const std::vector<cplx> s_calc = complex_injections(y, state);
        const Mismatch mis = pflow::mismatch(s_calc, s_sched, idx);
        res.timings.mismatch_ms += ms_since(t0);

        res.max_mismatch = mis.max_abs;
        res.iterations = iter;
        if (mis.max_abs <= opts.tol) {
            res.converged = true;
            break;
        }
        if (iter >= opts.max_iter) break;

        t0 = Clock::now();
        if (opts.path == DerivativePath::FusedDirect) {
            fused_derivatives(y, state, deriv, &res.derivative_counters);
        } else {
            deriv = generic_derivatives(y, state, &res.derivative_counters);
        }
        res.timings.derivatives_ms += ms_since(t0);

        t0 = Clock::now();
        if (opts.path == DerivativePath::FusedDirect) {
            create_jacobian_direct(deriv, y, idx, jac, &res.jacobian_counters);
        } else {
            jac = create_jacobian_generic(deriv, y, idx, &res.jacobian_counters);
        }
        res.timings.jacobian_ms += ms_since(t0);

        t0 = Clock::now();
        const std::vector<double> dx = lu_solve(jac, mis.f);
        res.timings.linear_solve_ms += ms_since(t0);

        t0 = Clock::now();
        for (index_t p = 0; p < idx.n_pvpq; ++p) state.va[idx.pvpq[p]] -= dx[p];
        for (index_t p = 0; p < idx.n_pq; ++p)
            state.vm[idx.pq[p]] -= dx[idx.n_pvpq + p];
        state.refresh();
        res.timings.other_ms += ms_since(t0);
    }

    res.vm = std::move(state.vm);
    res.va = std::move(state.va);
    const double total = ms_since(t_total);
    res.timings.other_ms += total - res.timings.total_ms();
    return res;
}

}  // namespace pflow
