#include "pflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pflow/errors.hpp"

namespace pflow {

ComplexCRS build_ybus(const ValidatedCase& vc) {
    const index_t n = static_cast<index_t>(vc.n_bus());
    std::vector<cplx> diag(n, cplx{});
    std::vector<Triplet<cplx>> off;
    off.reserve(vc.grid.branches.size() * 2);

    for (const auto& br : vc.grid.branches) {
        if (!br.in_service) continue;
        if (br.r == 0.0 && br.x == 0.0)
            throw StructureError("branch " + std::to_string(br.from_bus) + "-" +
                                 std::to_string(br.to_bus) +
                                 " has zero series impedance");
        const index_t f = vc.index_of(br.from_bus);
        const index_t t = vc.index_of(br.to_bus);
        const cplx ys = 1.0 / cplx(br.r, br.x);
        const cplx ysh(0.0, br.b / 2.0);
        const double shift = br.shift * std::numbers::pi / 180.0;
        const cplx tau = std::polar(br.tap, shift);

        diag[f] += (ys + ysh) / (br.tap * br.tap);
        diag[t] += ys + ysh;
        off.push_back({f, t, -ys / std::conj(tau)});
        off.push_back({t, f, -ys / tau});
    }
    for (index_t i = 0; i < n; ++i) {
        const auto& b = vc.bus(i);
        diag[i] += cplx(b.gs, b.bs) / vc.grid.base_mva;
    }

    // Assemble manually rather than through crs_from_triplets: the full
    // diagonal is stored even where numerically zero, and off-diagonal
    // entries that cancel keep their slot so the pattern stays structurally
    // symmetric.
    std::sort(off.begin(), off.end(), [](const auto& a, const auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    ComplexCRS y(n, n);
    y.values.reserve(off.size() + n);
    y.col_idx.reserve(off.size() + n);
    std::size_t k = 0;
    for (index_t i = 0; i < n; ++i) {
        bool diag_done = false;
        auto push_diag = [&] {
            y.values.push_back(diag[i]);
            y.col_idx.push_back(i);
            diag_done = true;
        };
        while (k < off.size() && off[k].row == i) {
            const index_t col = off[k].col;
            cplx sum = off[k].value;
            ++k;
            while (k < off.size() && off[k].row == i && off[k].col == col) {
                sum += off[k].value;
                ++k;
            }
            if (!diag_done && col > i) push_diag();
            y.values.push_back(sum);
            y.col_idx.push_back(col);
        }
        if (!diag_done) push_diag();
        y.row_ptr[i + 1] = static_cast<index_t>(y.values.size());
    }
    detail::debug_validate(y);
    return y;
}

IndexSets bus_index_sets(const ValidatedCase& vc) {
    const index_t n = static_cast<index_t>(vc.n_bus());
    IndexSets idx;
    for (index_t b = 0; b < n; ++b) {
        switch (vc.bus(b).btype) {
            case BusType::PV: idx.pv.push_back(b); break;
            case BusType::PQ: idx.pq.push_back(b); break;
            case BusType::Slack: break;
        }
    }
    // pv and pq are ascending by construction of the loop above.
    idx.pvpq = idx.pv;
    idx.pvpq.insert(idx.pvpq.end(), idx.pq.begin(), idx.pq.end());
    idx.n_pv = static_cast<index_t>(idx.pv.size());
    idx.n_pq = static_cast<index_t>(idx.pq.size());
    idx.n_pvpq = idx.n_pv + idx.n_pq;

    idx.pvpq_lookup.assign(n, 0);
    for (index_t p = 0; p < idx.n_pvpq; ++p) idx.pvpq_lookup[idx.pvpq[p]] = p;
    idx.pq_lookup.assign(n, 0);
    for (index_t p = 0; p < idx.n_pq; ++p) idx.pq_lookup[idx.pq[p]] = p;
    return idx;
}

std::vector<cplx> scheduled_injections(const ValidatedCase& vc) {
    std::vector<cplx> s(vc.n_bus(), cplx{});
    for (const auto& g : vc.grid.gens) {
        if (!g.in_service) continue;
        s[vc.index_of(g.bus)] += cplx(g.pg, g.qg);
    }
    for (int i = 0; i < vc.n_bus(); ++i) {
        const auto& b = vc.bus(i);
        s[i] -= cplx(b.pd, b.qd);
        s[i] /= vc.grid.base_mva;
    }
    return s;
}

}  // namespace pflow
