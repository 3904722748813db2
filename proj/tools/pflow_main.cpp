// pflow command line: `run` solves a case, `bench` times the solver phases,
// `synth` writes a synthetic grid. Exit codes: 0 success/converged,
// 2 non-convergence, 1 input or usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pflow/bench.hpp"
#include "pflow/caseio.hpp"
#include "pflow/errors.hpp"
#include "pflow/solver.hpp"
#include "pflow/synth.hpp"

namespace {

using nlohmann::ordered_json;

pflow::SolveOptions make_options(double tol, int max_iter, const std::string& init,
                                 const std::string& path) {
    pflow::SolveOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    opts.init = init == "case" ? pflow::InitMode::FromCase : pflow::InitMode::Flat;
    opts.path = path == "generic" ? pflow::DerivativePath::Generic
                                  : pflow::DerivativePath::FusedDirect;
    return opts;
}

ordered_json result_json(const pflow::ValidatedCase& vc,
                         const pflow::PowerFlowResult& res) {
    const double rad2deg = 180.0 / std::numbers::pi;
    ordered_json buses = ordered_json::array();
    for (int i = 0; i < vc.n_bus(); ++i)
        buses.push_back({{"id", vc.bus_ids[i]},
                         {"vm", res.vm[i]},
                         {"va_deg", res.va[i] * rad2deg}});
    const int iters = std::max(res.iterations, 1);
    return ordered_json{
        {"converged", res.converged},
        {"iterations", res.iterations},
        {"max_mismatch", res.max_mismatch},
        {"buses", buses},
        {"timings_ms",
         {{"derivatives", res.timings.derivatives_ms},
          {"jacobian", res.timings.jacobian_ms},
          {"linear_solve", res.timings.linear_solve_ms},
          {"mismatch", res.timings.mismatch_ms},
          {"other", res.timings.other_ms}}},
        {"visits",
         {{"derivatives_per_iteration", res.derivative_counters.element_visits / iters},
          {"jacobian_per_iteration", res.jacobian_counters.element_visits / iters}}}};
}

void print_table(const pflow::ValidatedCase& vc, const pflow::PowerFlowResult& res) {
    const double rad2deg = 180.0 / std::numbers::pi;
    std::printf("%s in %d iterations, max mismatch %.3e p.u.\n",
                res.converged ? "converged" : "NOT converged", res.iterations,
                res.max_mismatch);
    std::printf("%8s %12s %12s\n", "bus", "vm [p.u.]", "va [deg]");
    for (int i = 0; i < vc.n_bus(); ++i)
        std::printf("%8d %12.6f %12.6f\n", vc.bus_ids[i], res.vm[i],
                    res.va[i] * rad2deg);
    std::printf("timings [ms]: derivatives %.3f, jacobian %.3f, linear_solve %.3f, "
                "mismatch %.3f, other %.3f\n",
                res.timings.derivatives_ms, res.timings.jacobian_ms,
                res.timings.linear_solve_ms, res.timings.mismatch_ms,
                res.timings.other_ms);
}

int cmd_run(const std::string& case_path, double tol, int max_iter,
            const std::string& init, const std::string& path, bool as_json) {
    const pflow::Case c = pflow::load_case_file(case_path);
    const pflow::ValidatedCase vc = pflow::validate_case(c);
    const pflow::PowerFlowResult res =
        pflow::newton_raphson(vc, make_options(tol, max_iter, init, path));
    if (as_json) {
        std::cout << result_json(vc, res).dump(2) << "\n";
    } else {
        print_table(vc, res);
    }
    return res.converged ? 0 : 2;
}

int cmd_bench(const std::string& case_path, int runs, const std::string& path,
              const std::string& csv_path, double tol, int max_iter) {
    const pflow::Case c = pflow::load_case_file(case_path);
    const pflow::ValidatedCase vc = pflow::validate_case(c);
    pflow::SolveOptions base = make_options(tol, max_iter, "flat", "fused");

    std::vector<pflow::BenchReport> reports;
    if (path == "fused" || path == "both")
        reports.push_back(pflow::run_benchmark(vc, c.name, pflow::DerivativePath::FusedDirect,
                                               runs, base));
    if (path == "generic" || path == "both")
        reports.push_back(pflow::run_benchmark(vc, c.name, pflow::DerivativePath::Generic,
                                               runs, base));

    for (const auto& rep : reports) {
        std::printf("%s [%s]: %d runs, %d buses, nnz %d, %d iterations\n",
                    rep.case_name.c_str(), pflow::path_name(rep.path), rep.runs,
                    rep.n_bus, static_cast<int>(rep.nnz_y), rep.iterations);
        std::printf("  min ms: derivatives %.6f, jacobian %.6f, linear_solve %.6f, "
                    "total %.6f\n",
                    rep.min_derivatives_ms, rep.min_jacobian_ms,
                    rep.min_linear_solve_ms, rep.min_total_ms);
        std::printf("  visits/iteration: derivatives %llu, jacobian %llu\n",
                    static_cast<unsigned long long>(rep.derivative_visits),
                    static_cast<unsigned long long>(rep.jacobian_visits));
    }

    const std::string csv = pflow::bench_csv(reports);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) {
            std::cerr << "error: cannot write " << csv_path << "\n";
            return 1;
        }
        out << csv;
    } else {
        std::cout << csv;
    }
    return 0;
}

int cmd_synth(int buses, double degree, double pv_frac, std::uint64_t seed,
              const std::string& out_path) {
    const pflow::Case c = pflow::synth_grid(buses, degree, pv_frac, seed);
    const std::string text = pflow::serialize_case_json(c);
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 1;
        }
        out << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Newton-Raphson power flow with direct CRS Jacobian assembly"};
    app.require_subcommand(1);

    std::string case_path, init = "flat", path = "fused", csv_path, out_path;
    double tol = 1e-8, degree = 3.0, pv_frac = 0.2;
    int max_iter = 10, runs = 100, buses = 0;
    std::uint64_t seed = 1;
    bool as_json = false, as_table = false;

    auto* run = app.add_subcommand("run", "Solve a power flow case");
    run->add_option("case", case_path, "case file (.m or .json)")->required();
    run->add_option("--tol", tol, "mismatch tolerance in p.u.");
    run->add_option("--max-iter", max_iter, "maximum iterations");
    run->add_option("--init", init, "initial estimate")
        ->check(CLI::IsMember({"flat", "case"}));
    run->add_option("--path", path, "derivative/Jacobian path")
        ->check(CLI::IsMember({"fused", "generic"}));
    run->add_flag("--json", as_json, "JSON output");
    run->add_flag("--table", as_table, "table output (default)");

    std::string bench_path = "both";
    auto* bench = app.add_subcommand("bench", "Time repeated solves per path");
    bench->add_option("case", case_path, "case file (.m or .json)")->required();
    bench->add_option("--runs", runs, "timed runs per path");
    bench->add_option("--path", bench_path, "paths to benchmark")
        ->check(CLI::IsMember({"fused", "generic", "both"}));
    bench->add_option("--csv", csv_path, "write CSV to this file");
    bench->add_option("--tol", tol, "mismatch tolerance in p.u.");
    bench->add_option("--max-iter", max_iter, "maximum iterations");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic grid");
    synth->add_option("--buses", buses, "number of buses")->required();
    synth->add_option("--degree", degree, "target average degree");
    synth->add_option("--pv-frac", pv_frac, "PV share of non-slack buses");
    synth->add_option("--seed", seed, "random seed");
    synth->add_option("-o,--output", out_path, "output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(case_path, tol, max_iter, init, path, as_json);
        if (bench->parsed())
            return cmd_bench(case_path, runs, bench_path, csv_path, tol, max_iter);
        if (synth->parsed()) return cmd_synth(buses, degree, pv_frac, seed, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
