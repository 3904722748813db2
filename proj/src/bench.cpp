#include "pflow/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "pflow/network.hpp"

namespace pflow {

const char* path_name(DerivativePath path) {
    return path == DerivativePath::FusedDirect ? "fused" : "generic";
}

BenchReport run_benchmark(const ValidatedCase& vc, const std::string& case_name,
                          DerivativePath path, int runs, const SolveOptions& base) {
    BenchReport rep;
    rep.case_name = case_name;
    rep.n_bus = vc.n_bus();
    rep.nnz_y = build_ybus(vc).nnz();
    rep.path = path;
    rep.runs = runs;

    SolveOptions opts = base;
    opts.path = path;

    newton_raphson(vc, opts);  // warm-up, untimed

    double min_d = 0, min_j = 0, min_l = 0, min_t = 0;
    for (int r = 0; r < runs; ++r) {
        const PowerFlowResult res = newton_raphson(vc, opts);
        const double total = res.timings.total_ms();
        if (r == 0) {
            min_d = res.timings.derivatives_ms;
            min_j = res.timings.jacobian_ms;
            min_l = res.timings.linear_solve_ms;
            min_t = total;
        } else {
            min_d = std::min(min_d, res.timings.derivatives_ms);
            min_j = std::min(min_j, res.timings.jacobian_ms);
            min_l = std::min(min_l, res.timings.linear_solve_ms);
            min_t = std::min(min_t, total);
        }
        if (r == runs - 1) {
            rep.iterations = res.iterations;
            if (res.iterations > 0) {
                rep.derivative_visits =
                    res.derivative_counters.element_visits / res.iterations;
                rep.jacobian_visits =
                    res.jacobian_counters.element_visits / res.iterations;
            }
            rep.vm = res.vm;
            rep.va = res.va;
        }
    }
    rep.min_derivatives_ms = min_d;
    rep.min_jacobian_ms = min_j;
    rep.min_linear_solve_ms = min_l;
    rep.min_total_ms = min_t;
    return rep;
}

std::string bench_csv(std::span<const BenchReport> reports) {
    std::string out = "case,path,phase,min_ms,runs,n_bus,nnz\n";
    char buf[256];
    for (const auto& rep : reports) {
        const std::pair<const char*, double> phases[] = {
            {"derivatives", rep.min_derivatives_ms},
            {"jacobian", rep.min_jacobian_ms},
            {"linear_solve", rep.min_linear_solve_ms},
            {"total", rep.min_total_ms},
        };
        for (const auto& [phase, ms] : phases) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6f,%d,%d,%d\n",
                          rep.case_name.c_str(), path_name(rep.path), phase, ms,
                          rep.runs, rep.n_bus, static_cast<int>(rep.nnz_y));
            out += buf;
        }
    }
    return out;
}

}  // namespace pflow
