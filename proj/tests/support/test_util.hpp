#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pflow/case.hpp"
#include "pflow/derivatives.hpp"
#include "pflow/synth.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(PFLOW_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline pflow::ValidatedCase random_grid(int n_bus, double avg_degree,
                                        double pv_fraction, std::uint64_t seed) {
    return pflow::validate_case(
        pflow::synth_grid(n_bus, avg_degree, pv_fraction, seed));
}

inline pflow::VoltageState random_state(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.9, 1.1), ang(-0.5, 0.5);
    std::vector<double> vm(n), va(n);
    for (int i = 0; i < n; ++i) {
        vm[i] = mag(rng);
        va[i] = ang(rng);
    }
    return pflow::VoltageState::from_polar(std::move(vm), std::move(va));
}

inline double rel_err(pflow::cplx got, pflow::cplx want) {
    const double scale = std::max(1.0, std::abs(want));
    return std::abs(got - want) / scale;
}

inline bool case_equal(const pflow::Case& a, const pflow::Case& b) {
    if (a.name != b.name || a.base_mva != b.base_mva ||
        a.buses.size() != b.buses.size() || a.gens.size() != b.gens.size() ||
        a.branches.size() != b.branches.size())
        return false;
    for (std::size_t i = 0; i < a.buses.size(); ++i) {
        const auto &x = a.buses[i], &y = b.buses[i];
        if (x.id != y.id || x.btype != y.btype || x.pd != y.pd || x.qd != y.qd ||
            x.gs != y.gs || x.bs != y.bs || x.vm != y.vm || x.va != y.va)
            return false;
    }
    for (std::size_t i = 0; i < a.gens.size(); ++i) {
        const auto &x = a.gens[i], &y = b.gens[i];
        if (x.bus != y.bus || x.pg != y.pg || x.qg != y.qg || x.vg != y.vg ||
            x.in_service != y.in_service)
            return false;
    }
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        const auto &x = a.branches[i], &y = b.branches[i];
        if (x.from_bus != y.from_bus || x.to_bus != y.to_bus || x.r != y.r ||
            x.x != y.x || x.b != y.b || x.tap != y.tap || x.shift != y.shift ||
            x.in_service != y.in_service)
            return false;
    }
    return true;
}

}  // namespace testutil
