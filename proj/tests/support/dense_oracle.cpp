#include "dense_oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pflow/derivatives.hpp"

namespace oracle {

namespace {

std::vector<cplx> matvec(const Dense& a, const std::vector<cplx>& v) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n, cplx{});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < v.size(); ++k) out[i] += a[i][k] * v[k];
    return out;
}

}  // namespace

Dense dense_ybus(const pflow::ValidatedCase& vc) {
    const std::size_t n = vc.n_bus();
    Dense y(n, std::vector<cplx>(n, cplx{}));
    for (const auto& br : vc.grid.branches) {
        if (!br.in_service) continue;
        const int f = vc.index_of(br.from_bus);
        const int t = vc.index_of(br.to_bus);
        const cplx ys = 1.0 / cplx(br.r, br.x);
        const cplx half_b(0.0, br.b / 2.0);
        const cplx tau = std::polar(br.tap, br.shift * std::numbers::pi / 180.0);
        y[f][f] += (ys + half_b) / (br.tap * br.tap);
        y[t][t] += ys + half_b;
        y[f][t] += -ys / std::conj(tau);
        y[t][f] += -ys / tau;
    }
    for (std::size_t i = 0; i < n; ++i)
        y[i][i] += cplx(vc.bus(i).gs, vc.bus(i).bs) / vc.grid.base_mva;
    return y;
}

DenseDerivatives dense_derivatives(const Dense& y, const std::vector<cplx>& v) {
    const std::size_t n = y.size();
    std::vector<cplx> vnorm(n);
    for (std::size_t i = 0; i < n; ++i) vnorm[i] = v[i] / std::abs(v[i]);

    DenseDerivatives d;
    d.ibus = matvec(y, v);
    d.dvm.assign(n, std::vector<cplx>(n, cplx{}));
    d.dva.assign(n, std::vector<cplx>(n, cplx{}));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            // d(V) * (Y * d(V_norm))^*
            d.dvm[i][k] = v[i] * std::conj(y[i][k] * vnorm[k]);
            // j * d(V) * (d(I) - Y * d(V))^*
            const cplx inner = (i == k ? d.ibus[i] : cplx{}) - y[i][k] * v[k];
            d.dva[i][k] = cplx(0.0, 1.0) * v[i] * std::conj(inner);
        }
        d.dvm[i][i] += std::conj(d.ibus[i]) * vnorm[i];
    }
    return d;
}

DenseReal dense_jacobian(const DenseDerivatives& d, const pflow::IndexSets& idx) {
    const std::size_t dim = static_cast<std::size_t>(idx.n_pvpq) + idx.n_pq;
    DenseReal j(dim, std::vector<double>(dim, 0.0));
    for (std::size_t r = 0; r < dim; ++r) {
        const bool lower = r >= static_cast<std::size_t>(idx.n_pvpq);
        const int bus_r = lower ? idx.pq[r - idx.n_pvpq] : idx.pvpq[r];
        for (std::size_t c = 0; c < dim; ++c) {
            const bool right = c >= static_cast<std::size_t>(idx.n_pvpq);
            const int bus_c = right ? idx.pq[c - idx.n_pvpq] : idx.pvpq[c];
            const cplx e = right ? d.dvm[bus_r][bus_c] : d.dva[bus_r][bus_c];
            j[r][c] = lower ? e.imag() : e.real();
        }
    }
    return j;
}

std::vector<double> dense_solve(DenseReal a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        if (a[piv][k] == 0.0) throw std::runtime_error("dense_solve: singular");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            if (m == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) a[i][c] -= m * a[k][c];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double acc = b[k];
        for (std::size_t c = k + 1; c < n; ++c) acc -= a[k][c] * x[c];
        x[k] = acc / a[k][k];
    }
    return x;
}

DenseNR dense_newton_raphson(const pflow::ValidatedCase& vc, double tol, int max_iter) {
    const int n = vc.n_bus();
    const Dense y = dense_ybus(vc);
    const std::vector<cplx> s_sched = pflow::scheduled_injections(vc);
    const pflow::IndexSets idx = pflow::bus_index_sets(vc);
    const double deg = std::numbers::pi / 180.0;

    DenseNR r;
    r.vm.assign(n, 1.0);
    r.va.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (vc.bus(i).btype == pflow::BusType::Slack) r.va[i] = vc.bus(i).va * deg;
    for (const auto& g : vc.grid.gens) {
        if (!g.in_service) continue;
        const int b = vc.index_of(g.bus);
        if (vc.bus(b).btype != pflow::BusType::PQ) r.vm[b] = g.vg;
    }

    const std::size_t dim = static_cast<std::size_t>(idx.n_pvpq) + idx.n_pq;
    for (int iter = 0;; ++iter) {
        std::vector<cplx> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::polar(r.vm[i], r.va[i]);
        const std::vector<cplx> ibus = matvec(y, v);
        std::vector<double> f(dim, 0.0);
        double worst = 0.0;
        std::size_t w = 0;
        for (pflow::index_t b : idx.pvpq)
            f[w++] = (v[b] * std::conj(ibus[b]) - s_sched[b]).real();
        for (pflow::index_t b : idx.pq)
            f[w++] = (v[b] * std::conj(ibus[b]) - s_sched[b]).imag();
        for (double e : f) worst = std::max(worst, std::abs(e));

        r.iterations = iter;
        if (worst <= tol) {
            r.converged = true;
            return r;
        }
        if (iter >= max_iter) return r;

        const DenseDerivatives d = dense_derivatives(y, v);
        const DenseReal j = dense_jacobian(d, idx);
        const std::vector<double> dx = dense_solve(j, f);
        for (pflow::index_t p = 0; p < idx.n_pvpq; ++p) r.va[idx.pvpq[p]] -= dx[p];
        for (pflow::index_t p = 0; p < idx.n_pq; ++p)
            r.vm[idx.pq[p]] -= dx[idx.n_pvpq + p];
    }
}

DenseReal fd_jacobian(const pflow::ComplexCRS& y, const pflow::IndexSets& idx,
                      const std::vector<cplx>& s_sched, std::vector<double> vm,
                      std::vector<double> va, double h) {
    const std::size_t dim = static_cast<std::size_t>(idx.n_pvpq) + idx.n_pq;
    auto eval = [&](const std::vector<double>& vmc, const std::vector<double>& vac) {
        const auto state = pflow::VoltageState::from_polar(vmc, vac);
        return pflow::mismatch(pflow::complex_injections(y, state), s_sched, idx).f;
    };

    DenseReal j(dim, std::vector<double>(dim, 0.0));
    for (std::size_t c = 0; c < dim; ++c) {
        std::vector<double> vm_p = vm, va_p = va, vm_m = vm, va_m = va;
        if (c < static_cast<std::size_t>(idx.n_pvpq)) {
            va_p[idx.pvpq[c]] += h;
            va_m[idx.pvpq[c]] -= h;
        } else {
            vm_p[idx.pq[c - idx.n_pvpq]] += h;
            vm_m[idx.pq[c - idx.n_pvpq]] -= h;
        }
        const std::vector<double> fp = eval(vm_p, va_p);
        const std::vector<double> fm = eval(vm_m, va_m);
        for (std::size_t r = 0; r < dim; ++r) j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
    }
    return j;
}

}  // namespace oracle
