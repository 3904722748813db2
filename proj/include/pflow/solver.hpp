#pragma once

#include <vector>

#include "pflow/case.hpp"
#include "pflow/counters.hpp"
#include "pflow/crs.hpp"

namespace pflow {

enum class InitMode { Flat, FromCase };

enum class DerivativePath { FusedDirect, Generic };

struct SolveOptions {
    double tol = 1e-8;   // p.u. mismatch tolerance, infinity norm
    int max_iter = 10;
    InitMode init = InitMode::Flat;
    DerivativePath path = DerivativePath::FusedDirect;
};

struct PhaseTimings {
    double derivatives_ms = 0.0;
    double jacobian_ms = 0.0;
    double linear_solve_ms = 0.0;
    double mismatch_ms = 0.0;
    double other_ms = 0.0;

    double total_ms() const {
        return derivatives_ms + jacobian_ms + linear_solve_ms + mismatch_ms + other_ms;
    }
};

struct PowerFlowResult {
    bool converged = false;
    int iterations = 0;
    std::vector<double> vm;  // p.u., internal bus order
    std::vector<double> va;  // radians
    double max_mismatch = 0.0;
    PhaseTimings timings;
    // Accumulated over all iterations; divide by iterations for per-call counts.
    OpCounters derivative_counters;
    OpCounters jacobian_counters;
};

/// Newton-Raphson driver. Initializes the voltage estimate (flat start or
/// case values, generator setpoints applied at PV and slack buses), then
/// iterates mismatch -> derivatives -> Jacobian -> linear solve -> update
/// until the infinity norm of the mismatch drops to tol or max_iter is
/// reached. Non-convergence is a normal result, not an error; a singular
/// Jacobian propagates as SingularError.
PowerFlowResult newton_raphson(const ValidatedCase& vc, const SolveOptions& opts = {});

}  // namespace pflow
