#include "pflow/derivatives.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pflow/errors.hpp"

namespace pflow {

VoltageState VoltageState::from_polar(std::vector<double> vm, std::vector<double> va) {
    if (vm.size() != va.size())
        throw StructureError("voltage state: vm and va length mismatch");
    VoltageState s;
    s.vm = std::move(vm);
    s.va = std::move(va);
    s.refresh();
    return s;
}

void VoltageState::refresh() {
    const std::size_t n = vm.size();
    v.resize(n);
    v_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx dir(std::cos(va[i]), std::sin(va[i]));
        v_norm[i] = dir;
        v[i] = vm[i] * dir;
    }
}

namespace {

void check_square_state(const ComplexCRS& y, const VoltageState& state) {
    if (y.n_rows != y.n_cols)
        throw StructureError("derivatives: admittance matrix must be square");
    if (static_cast<index_t>(state.size()) != y.n_rows)
        throw StructureError("derivatives: state dimension " +
                             std::to_string(state.size()) + " does not match matrix " +
                             std::to_string(y.n_rows));
}

}  // namespace

void fused_derivatives(const ComplexCRS& y, const VoltageState& state,
                       DerivativePair& out, OpCounters* counters) {
    check_square_state(y, state);
    const index_t n = y.n_rows;
    const std::size_t nnz = y.values.size();
    out.dva_x.resize(nnz);
    out.dvm_x.resize(nnz);
    out.ibus.assign(n, cplx{});
    out.temp.resize(n);

    const cplx* yx = y.values.data();
    const index_t* yj = y.col_idx.data();
    const index_t* yp = y.row_ptr.data();
    const cplx* v = state.v.data();
    const cplx* vn = state.v_norm.data();
    cplx* dva = out.dva_x.data();
    cplx* dvm = out.dvm_x.data();

    // Pass 1: injected current plus the products y_ik*v_k and y_ik*v_norm_k.
    for (index_t i = 0; i < n; ++i) {
        cplx acc{};
        for (index_t k = yp[i]; k < yp[i + 1]; ++k) {
            const index_t col = yj[k];
            const cplx yv = yx[k] * v[col];
            acc += yv;
            dvm[k] = yx[k] * vn[col];
            dva[k] = yv;
        }
        out.ibus[i] = acc;
        out.temp[i] = std::conj(acc) * vn[i];
    }

    // Pass 2: finish both data vectors in place. The diagonal entry of dVa
    // becomes j*v_i*conj(ibus_i - y_ii*v_i); off-diagonals pick up the
    // negation so that the final matrix equals j*d(V)*(d(I) - Y*d(V))^*.
    for (index_t i = 0; i < n; ++i) {
        const cplx vi = v[i];
        const cplx jvi(-vi.imag(), vi.real());  // j * v_i
        bool diag_seen = false;
        for (index_t k = yp[i]; k < yp[i + 1]; ++k) {
            dvm[k] = std::conj(dvm[k]) * vi;
            if (yj[k] == i) {
                dvm[k] += out.temp[i];
                dva[k] = jvi * std::conj(out.ibus[i] - dva[k]);
                diag_seen = true;
            } else {
                dva[k] = jvi * std::conj(-dva[k]);
            }
        }
        if (!diag_seen)
            throw StructureError("fused_derivatives: missing diagonal slot in row " +
                                 std::to_string(i));
    }
    count_visits(counters, 2 * nnz);
}

DerivativePair fused_derivatives(const ComplexCRS& y, const VoltageState& state,
                                 OpCounters* counters) {
    DerivativePair out;
    fused_derivatives(y, state, out, counters);
    return out;
}

// ---------------------------------------------------------------------------
// Generic baseline: one pattern traversal per operation
// ---------------------------------------------------------------------------

namespace {

// Each helper materializes a fresh matrix, column indices and row pointer
// included, the way generic sparse toolkits do.

ComplexCRS copy_shell(const ComplexCRS& a, OpCounters* c) {
    ComplexCRS out;
    out.n_rows = a.n_rows;
    out.n_cols = a.n_cols;
    out.col_idx = a.col_idx;
    out.row_ptr = a.row_ptr;
    out.values.resize(a.values.size());
    count_pattern_alloc(c);
    return out;
}

// a * d(s): scales column k by s[k].
ComplexCRS scale_cols(const ComplexCRS& a, std::span<const cplx> s, OpCounters* c) {
    ComplexCRS out = copy_shell(a, c);
    for (index_t i = 0; i < a.n_rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            out.values[k] = a.values[k] * s[a.col_idx[k]];
    count_visits(c, a.values.size());
    return out;
}

// d(s) * a: scales row i by s[i].
ComplexCRS scale_rows(const ComplexCRS& a, std::span<const cplx> s, OpCounters* c) {
    ComplexCRS out = copy_shell(a, c);
    for (index_t i = 0; i < a.n_rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            out.values[k] = s[i] * a.values[k];
    count_visits(c, a.values.size());
    return out;
}

ComplexCRS conj_entries(const ComplexCRS& a, OpCounters* c) {
    ComplexCRS out = copy_shell(a, c);
    for (std::size_t k = 0; k < a.values.size(); ++k)
        out.values[k] = std::conj(a.values[k]);
    count_visits(c, a.values.size());
    return out;
}

ComplexCRS scalar_mul(const ComplexCRS& a, cplx factor, OpCounters* c) {
    ComplexCRS out = copy_shell(a, c);
    for (std::size_t k = 0; k < a.values.size(); ++k)
        out.values[k] = factor * a.values[k];
    count_visits(c, a.values.size());
    return out;
}

ComplexCRS diag_matrix(std::span<const cplx> d, OpCounters* c) {
    const index_t n = static_cast<index_t>(d.size());
    ComplexCRS out(n, n);
    out.values.assign(d.begin(), d.end());
    out.col_idx.resize(n);
    for (index_t i = 0; i < n; ++i) {
        out.col_idx[i] = i;
        out.row_ptr[i + 1] = i + 1;
    }
    count_visits(c, d.size());
    count_pattern_alloc(c);
    return out;
}

// alpha*a + beta*b via a two-pointer merge over both patterns.
ComplexCRS sparse_add(const ComplexCRS& a, double alpha, const ComplexCRS& b,
                      double beta, OpCounters* c) {
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
        throw StructureError("sparse_add: shape mismatch");
    ComplexCRS out(a.n_rows, a.n_cols);
    out.values.reserve(a.values.size() + b.values.size());
    out.col_idx.reserve(a.values.size() + b.values.size());
    for (index_t i = 0; i < a.n_rows; ++i) {
        index_t ka = a.row_ptr[i], kb = b.row_ptr[i];
        const index_t ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
        while (ka < ea || kb < eb) {
            index_t ca = ka < ea ? a.col_idx[ka] : a.n_cols;
            index_t cb = kb < eb ? b.col_idx[kb] : b.n_cols;
            if (ca < cb) {
                out.col_idx.push_back(ca);
                out.values.push_back(alpha * a.values[ka++]);
            } else if (cb < ca) {
                out.col_idx.push_back(cb);
                out.values.push_back(beta * b.values[kb++]);
            } else {
                out.col_idx.push_back(ca);
                out.values.push_back(alpha * a.values[ka++] + beta * b.values[kb++]);
            }
        }
        out.row_ptr[i + 1] = static_cast<index_t>(out.values.size());
    }
    count_visits(c, a.values.size() + b.values.size());
    count_pattern_alloc(c);
    return out;
}

// Gathers the values of a full matrix onto the reference pattern, verifying
// that every reference slot exists in the source.
void align_to_pattern(const ComplexCRS& src, const ComplexCRS& pattern,
                      std::vector<cplx>& out, OpCounters* c) {
    out.assign(pattern.values.size(), cplx{});
    for (index_t i = 0; i < pattern.n_rows; ++i) {
        index_t ks = src.row_ptr[i];
        const index_t es = src.row_ptr[i + 1];
        for (index_t k = pattern.row_ptr[i]; k < pattern.row_ptr[i + 1]; ++k) {
            const index_t col = pattern.col_idx[k];
            while (ks < es && src.col_idx[ks] < col) ++ks;
            if (ks < es && src.col_idx[ks] == col) {
                out[k] = src.values[ks];
            } else {
                throw StructureError("generic derivatives: pattern diverged at row " +
                                     std::to_string(i));
            }
        }
    }
    count_visits(c, pattern.values.size());
}

}  // namespace

DerivativePair generic_derivatives(const ComplexCRS& y, const VoltageState& state,
                                   OpCounters* counters) {
    check_square_state(y, state);
    const index_t n = y.n_rows;

    DerivativePair out;
    out.ibus = crs_matvec(y, state.v, counters);

    // temp = conj(ibus) .* v_norm, one pass over the n-vector.
    out.temp.resize(n);
    for (index_t i = 0; i < n; ++i)
        out.temp[i] = std::conj(out.ibus[i]) * state.v_norm[i];
    count_visits(counters, static_cast<std::uint64_t>(n));

    // dVm = d(V) * (Y * d(V_norm))^* + d(temp)
    ComplexCRS a = scale_cols(y, state.v_norm, counters);
    a = conj_entries(a, counters);
    a = scale_rows(a, state.v, counters);
    ComplexCRS dvm_full = sparse_add(a, 1.0, diag_matrix(out.temp, counters), 1.0,
                                     counters);

    // dVa = j * d(V) * (d(I) - Y * d(V))^*
    ComplexCRS b = scale_cols(y, state.v, counters);
    b = sparse_add(diag_matrix(out.ibus, counters), 1.0, b, -1.0, counters);
    b = conj_entries(b, counters);
    b = scale_rows(b, state.v, counters);
    ComplexCRS dva_full = scalar_mul(b, cplx(0.0, 1.0), counters);

    // The composed matrices carry freshly computed patterns; gather them back
    // onto Y's layout, which also verifies the patterns agree.
    align_to_pattern(dvm_full, y, out.dvm_x, counters);
    align_to_pattern(dva_full, y, out.dva_x, counters);
    return out;
}

std::vector<cplx> complex_injections(const ComplexCRS& y, const VoltageState& state) {
    check_square_state(y, state);
    std::vector<cplx> s = crs_matvec(y, state.v);
    for (index_t i = 0; i < y.n_rows; ++i) s[i] = state.v[i] * std::conj(s[i]);
    return s;
}

void polar_injections(const ComplexCRS& y, std::span<const double> vm,
                      std::span<const double> va, std::vector<double>& p,
                      std::vector<double>& q) {
    if (y.n_rows != y.n_cols || static_cast<index_t>(vm.size()) != y.n_rows ||
        vm.size() != va.size())
        throw StructureError("polar_injections: dimension mismatch");
    p.assign(vm.size(), 0.0);
    q.assign(vm.size(), 0.0);
    for (index_t i = 0; i < y.n_rows; ++i) {
        double pi = 0.0, qi = 0.0;
        for (index_t k = y.row_ptr[i]; k < y.row_ptr[i + 1]; ++k) {
            const index_t kk = y.col_idx[k];
            const double g = y.values[k].real();
            const double bb = y.values[k].imag();
            const double theta = va[i] - va[kk];
            const double w = vm[i] * vm[kk];
            pi += w * (g * std::cos(theta) + bb * std::sin(theta));
            qi += w * (g * std::sin(theta) - bb * std::cos(theta));
        }
        p[i] = pi;
        q[i] = qi;
    }
}

Mismatch mismatch(std::span<const cplx> s_calc, std::span<const cplx> s_sched,
                  const IndexSets& idx) {
    Mismatch m;
    m.f.resize(static_cast<std::size_t>(idx.n_pvpq) + idx.n_pq);
    std::size_t w = 0;
    for (index_t b : idx.pvpq) m.f[w++] = (s_calc[b] - s_sched[b]).real();
    for (index_t b : idx.pq) m.f[w++] = (s_calc[b] - s_sched[b]).imag();
    m.max_abs = 0.0;
    for (double v : m.f) m.max_abs = std::max(m.max_abs, std::abs(v));
    return m;
}

}  // namespace pflow
