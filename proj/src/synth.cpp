#include "pflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "pflow/errors.hpp"
#include "pflow/solver.hpp"

namespace pflow {

Case synth_grid(int n_bus, double avg_degree, double pv_fraction, std::uint64_t seed) {
    if (n_bus < 2) throw ValidationError("synth_grid: n_bus must be at least 2");
    if (avg_degree < 1.0) throw ValidationError("synth_grid: avg_degree must be >= 1");
    if (pv_fraction < 0.0 || pv_fraction > 1.0)
        throw ValidationError("synth_grid: pv_fraction must be in [0, 1]");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Random spanning tree: bus i attaches to a uniform earlier bus.
    std::vector<std::pair<int, int>> edges;
    std::unordered_set<std::uint64_t> used;
    auto key = [n_bus](int a, int b) {
        if (a > b) std::swap(a, b);
        return static_cast<std::uint64_t>(a) * n_bus + b;
    };
    for (int i = 1; i < n_bus; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        const int j = pick(rng);
        edges.emplace_back(j, i);
        used.insert(key(j, i));
    }

    // Extra random edges up to the target count.
    const auto max_edges = static_cast<std::uint64_t>(n_bus) * (n_bus - 1) / 2;
    auto target = static_cast<std::uint64_t>(std::llround(n_bus * avg_degree / 2.0));
    target = std::min(target, max_edges);
    std::uniform_int_distribution<int> any(0, n_bus - 1);
    while (edges.size() < target) {
        const int a = any(rng), b = any(rng);
        if (a == b || used.count(key(a, b))) continue;
        edges.emplace_back(std::min(a, b), std::max(a, b));
        used.insert(key(a, b));
    }

    // Bus roles: bus 0 is the slack, a pv_fraction share of the rest is PV.
    std::vector<int> rest(n_bus - 1);
    for (int i = 0; i < n_bus - 1; ++i) rest[i] = i + 1;
    std::shuffle(rest.begin(), rest.end(), rng);
    const int n_pv = static_cast<int>(std::lround(pv_fraction * (n_bus - 1)));
    std::vector<char> is_pv(n_bus, 0);
    for (int i = 0; i < n_pv; ++i) is_pv[rest[i]] = 1;

    Case c;
    c.name = "synth" + std::to_string(n_bus) + "_s" + std::to_string(seed);
    c.base_mva = 100.0;
    std::vector<double> pd(n_bus, 0.0), qd(n_bus, 0.0);
    for (int i = 0; i < n_bus; ++i) {
        Bus b;
        b.id = i + 1;
        if (i == 0) b.btype = BusType::Slack;
        else b.btype = is_pv[i] ? BusType::PV : BusType::PQ;
        if (i != 0) {
            pd[i] = 0.1 + 0.9 * u01(rng);
            qd[i] = pd[i] * (0.2 + 0.3 * u01(rng));
        }
        b.pd = pd[i];
        b.qd = qd[i];
        c.buses.push_back(b);
    }
    c.gens.push_back({1, 0.0, 0.0, 1.0, true});  // slack
    for (int i = 1; i < n_bus; ++i)
        if (is_pv[i]) c.gens.push_back({i + 1, 0.1 + 0.9 * u01(rng), 0.0, 1.0, true});

    for (const auto& [f, t] : edges) {
        Branch br;
        br.from_bus = f + 1;
        br.to_bus = t + 1;
        br.r = 0.001 + 0.009 * u01(rng);
        br.x = 0.01 + 0.09 * u01(rng);
        c.branches.push_back(br);
    }

    // Keep the fixture well-posed: if the check solve does not converge from
    // a flat start, shave 20% off the loads and try again.
    for (int attempt = 0; attempt < 5; ++attempt) {
        SolveOptions opts;
        const PowerFlowResult check = newton_raphson(validate_case(c), opts);
        if (check.converged) break;
        for (auto& b : c.buses) {
            b.pd *= 0.8;
            b.qd *= 0.8;
        }
    }
    return c;
}

}  // namespace pflow
