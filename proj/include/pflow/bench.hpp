#pragma once

#include <span>
#include <string>
#include <vector>

#include "pflow/case.hpp"
#include "pflow/crs.hpp"
#include "pflow/solver.hpp"

namespace pflow {

/// Benchmark result for one case and one derivative/Jacobian path: per-phase
/// minima over R timed runs (one untimed warm-up first) plus per-iteration
/// element-visit counts.
struct BenchReport {
    std::string case_name;
    int n_bus = 0;
    index_t nnz_y = 0;
    DerivativePath path = DerivativePath::FusedDirect;
    int runs = 0;
    int iterations = 0;
    double min_derivatives_ms = 0.0;
    double min_jacobian_ms = 0.0;
    double min_linear_solve_ms = 0.0;
    double min_total_ms = 0.0;
    std::uint64_t derivative_visits = 0;  // per NR iteration
    std::uint64_t jacobian_visits = 0;    // per NR iteration
    // Solution accompanying the timings; identical across paths.
    std::vector<double> vm, va;
};

const char* path_name(DerivativePath path);

/// Runs R sequential full solves after one untimed warm-up and keeps the
/// per-phase minima. Timing never alters numerical results.
BenchReport run_benchmark(const ValidatedCase& vc, const std::string& case_name,
                          DerivativePath path, int runs, const SolveOptions& base = {});

/// CSV with the fixed header case,path,phase,min_ms,runs,n_bus,nnz and one
/// row per phase (derivatives, jacobian, linear_solve, total) per report.
/// Locale-independent formatting.
std::string bench_csv(std::span<const BenchReport> reports);

}  // namespace pflow
