#include <doctest.h>

#include <cmath>
#include <future>

#include "dense_oracle.hpp"
#include "pflow/caseio.hpp"
#include "pflow/derivatives.hpp"
#include "pflow/network.hpp"
#include "pflow/solver.hpp"
#include "test_util.hpp"

using namespace pflow;
using testutil::fixture_path;
using testutil::read_file;

namespace {

ValidatedCase load_fixture(const char* name) {
    return validate_case(parse_matpower_case(read_file(fixture_path(name))));
}

// Solution certificate: calculated injections reproduce the schedule at
// every non-slack bus, independent of the solver path.
void check_certificate(const ValidatedCase& vc, const PowerFlowResult& res,
                       double tol) {
    const ComplexCRS y = build_ybus(vc);
    const auto s_sched = scheduled_injections(vc);
    std::vector<double> p, q;
    polar_injections(y, res.vm, res.va, p, q);
    for (int i = 0; i < vc.n_bus(); ++i) {
        if (vc.bus(i).btype == BusType::Slack) continue;
        CHECK(std::abs(p[i] - s_sched[i].real()) <= tol);
        if (vc.bus(i).btype == BusType::PQ)
            CHECK(std::abs(q[i] - s_sched[i].imag()) <= tol);
    }
}

}  // namespace

TEST_CASE("slack-only grid converges in zero iterations") {
    Case c;
    c.base_mva = 100.0;
    c.buses.push_back({1, BusType::Slack, 0, 0, 0, 0, 1.0, 0});
    c.gens.push_back({1, 0, 0, 1.0, true});
    const PowerFlowResult res = newton_raphson(validate_case(c));
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.max_mismatch == 0.0);
    CHECK(res.vm == std::vector<double>{1.0});
}

TEST_CASE("two-bus fixture converges onto the dense oracle") {
    const ValidatedCase vc = load_fixture("twobus.m");
    SolveOptions opts;
    opts.tol = 1e-8;
    const PowerFlowResult res = newton_raphson(vc, opts);
    REQUIRE(res.converged);
    CHECK(res.iterations <= 5);
    CHECK(res.max_mismatch <= 1e-8);

    const auto want = oracle::dense_newton_raphson(vc);
    REQUIRE(want.converged);
    CHECK(std::abs(res.vm[1] - want.vm[1]) <= 1e-8);
    CHECK(std::abs(res.va[1] - want.va[1]) <= 1e-8);
    check_certificate(vc, res, opts.tol);
}

TEST_CASE("case118 converges from a flat start within ten iterations") {
    const ValidatedCase vc = load_fixture("case118.m");
    SolveOptions opts;
    opts.tol = 1e-8;
    opts.max_iter = 10;
    const PowerFlowResult res = newton_raphson(vc, opts);
    REQUIRE(res.converged);
    CHECK(res.iterations <= 10);

    const auto want = oracle::dense_newton_raphson(vc);
    REQUIRE(want.converged);
    for (int i = 0; i < vc.n_bus(); ++i) {
        CHECK(std::abs(res.vm[i] - want.vm[i]) <= 1e-8);
        CHECK(std::abs(res.va[i] - want.va[i]) <= 1e-8);
    }
    check_certificate(vc, res, 1e-8);
}

TEST_CASE("re-running from a converged state stops immediately") {
    const ValidatedCase vc = load_fixture("threebus.m");
    const PowerFlowResult first = newton_raphson(vc);
    REQUIRE(first.converged);

    ValidatedCase warm = vc;
    const double rad2deg = 180.0 / std::acos(-1.0);
    for (int i = 0; i < warm.n_bus(); ++i) {
        warm.grid.buses[i].vm = first.vm[i];
        warm.grid.buses[i].va = first.va[i] * rad2deg;
    }
    SolveOptions opts;
    opts.init = InitMode::FromCase;
    const PowerFlowResult again = newton_raphson(warm, opts);
    CHECK(again.converged);
    CHECK(again.iterations <= 1);
    CHECK(again.max_mismatch <= opts.tol);
}

TEST_CASE("fused and generic paths produce identical solutions") {
    for (const char* name : {"twobus.m", "threebus.m", "case118.m"}) {
        const ValidatedCase vc = load_fixture(name);
        SolveOptions fused, generic;
        generic.path = DerivativePath::Generic;
        const PowerFlowResult a = newton_raphson(vc, fused);
        const PowerFlowResult b = newton_raphson(vc, generic);
        REQUIRE(a.converged == b.converged);
        CHECK(a.iterations == b.iterations);
        for (int i = 0; i < vc.n_bus(); ++i) {
            CHECK(std::abs(a.vm[i] - b.vm[i]) <= 1e-10);
            CHECK(std::abs(a.va[i] - b.va[i]) <= 1e-10);
        }
    }
}

TEST_CASE("pv buses hold their setpoint magnitude") {
    const ValidatedCase vc = load_fixture("threebus.m");
    const PowerFlowResult res = newton_raphson(vc);
    REQUIRE(res.converged);
    CHECK(res.vm[1] == 1.02);  // vg of the PV generator, never updated
    CHECK(res.vm[0] == 1.0);   // slack
}

TEST_CASE("mismatch norms decrease after the first iteration") {
    // Track the sequence by re-solving with growing iteration caps.
    for (const char* name : {"twobus.m", "threebus.m", "case118.m"}) {
        const ValidatedCase vc = load_fixture(name);
        double prev = -1.0;
        for (int cap = 1; cap <= 4; ++cap) {
            SolveOptions opts;
            opts.max_iter = cap;
            opts.tol = 1e-14;
            const PowerFlowResult res = newton_raphson(vc, opts);
            if (res.converged) break;
            if (cap > 1) CHECK(res.max_mismatch < prev);
            prev = res.max_mismatch;
        }
    }
}

TEST_CASE("non-convergence is a normal result") {
    const ValidatedCase vc = load_fixture("overload.m");
    const PowerFlowResult res = newton_raphson(vc);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 10);
    CHECK(res.max_mismatch > 1.0);
}

TEST_CASE("random grids converge and certify against the schedule") {
    for (int trial = 0; trial < 6; ++trial) {
        const auto vc = testutil::random_grid(15 + 20 * trial, 2.4 + 0.2 * trial,
                                              0.3, 606 + trial);
        const PowerFlowResult res = newton_raphson(vc);
        REQUIRE(res.converged);
        check_certificate(vc, res, 1e-8);

        const auto want = oracle::dense_newton_raphson(vc);
        REQUIRE(want.converged);
        for (int i = 0; i < vc.n_bus(); ++i) {
            CHECK(std::abs(res.vm[i] - want.vm[i]) <= 1e-8);
            CHECK(std::abs(res.va[i] - want.va[i]) <= 1e-8);
        }
    }
}

TEST_CASE("independent solves run concurrently on distinct cases") {
    const ValidatedCase a = load_fixture("threebus.m");
    const ValidatedCase b = load_fixture("case118.m");
    auto fa = std::async(std::launch::async, [&] { return newton_raphson(a); });
    auto fb = std::async(std::launch::async, [&] { return newton_raphson(b); });
    const PowerFlowResult ra = fa.get();
    const PowerFlowResult rb = fb.get();
    CHECK(ra.converged);
    CHECK(rb.converged);
    const PowerFlowResult ra_seq = newton_raphson(a);
    for (int i = 0; i < a.n_bus(); ++i) CHECK(ra.vm[i] == ra_seq.vm[i]);
}

TEST_CASE("timing phases are populated") {
    const ValidatedCase vc = load_fixture("case118.m");
    const PowerFlowResult res = newton_raphson(vc);
    REQUIRE(res.converged);
    CHECK(res.timings.derivatives_ms > 0.0);
    CHECK(res.timings.jacobian_ms > 0.0);
    CHECK(res.timings.linear_solve_ms > 0.0);
    CHECK(res.timings.mismatch_ms > 0.0);
    CHECK(res.timings.total_ms() >=
          res.timings.derivatives_ms + res.timings.jacobian_ms);
    const std::uint64_t per_iter =
        res.derivative_counters.element_visits / res.iterations;
    CHECK(per_iter == 2 * static_cast<std::uint64_t>(build_ybus(vc).nnz()));
}
