#include "pflow/jacobian.hpp"

#include <string>
#include <utility>
#include <vector>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

void check_inputs(const DerivativePair& d, const ComplexCRS& y, const IndexSets& idx) {
    if (y.n_rows != y.n_cols)
        throw StructureError("jacobian: admittance pattern must be square");
    const std::size_t n = static_cast<std::size_t>(y.n_rows);
    if (d.dva_x.size() != y.values.size() || d.dvm_x.size() != y.values.size())
        throw StructureError("jacobian: derivative data does not match pattern nnz");
    if (idx.pvpq_lookup.size() != n || idx.pq_lookup.size() != n)
        throw StructureError("jacobian: lookup arrays do not match bus count");
    if (idx.n_pvpq != static_cast<index_t>(idx.pvpq.size()) ||
        idx.n_pv + idx.n_pq != idx.n_pvpq)
        throw StructureError("jacobian: inconsistent index set counts");
    for (index_t p = 0; p < idx.n_pvpq; ++p) {
        const index_t b = idx.pvpq[p];
        if (b < 0 || b >= static_cast<index_t>(n) || idx.pvpq_lookup[b] != p)
            throw StructureError("jacobian: pvpq lookup fails validation at position " +
                                 std::to_string(p));
    }
}

}  // namespace

void create_jacobian_direct(const DerivativePair& d, const ComplexCRS& y,
                            const IndexSets& idx, RealCRS& out,
                            OpCounters* counters) {
    check_inputs(d, y, idx);
    const index_t n_pv = idx.n_pv;
    const index_t n_pvpq = idx.n_pvpq;
    const index_t dim = n_pvpq + idx.n_pq;
    const std::size_t cap = 4 * y.values.size();

    out.n_rows = dim;
    out.n_cols = dim;
    out.values.resize(cap);
    out.col_idx.resize(cap);
    out.row_ptr.assign(static_cast<std::size_t>(dim) + 1, 0);

    index_t max_row = 0;
    for (index_t b = 0; b < y.n_rows; ++b)
        max_row = std::max(max_row, y.row_ptr[b + 1] - y.row_ptr[b]);

    // Staged runs keep columns ascending within a row: pvpq positions are
    // ascending over the pv block and over the pq block separately, but not
    // across the two, so pq-block angle entries and magnitude entries are
    // buffered during the scan and appended afterwards.
    std::vector<index_t> stage_col(2 * static_cast<std::size_t>(max_row));
    std::vector<double> stage_val(2 * static_cast<std::size_t>(max_row));
    const index_t* yj = y.col_idx.data();
    const index_t* lookup = idx.pvpq_lookup.data();
    const index_t* pvpq = idx.pvpq.data();
    const cplx* dva_x = d.dva_x.data();
    const cplx* dvm_x = d.dvm_x.data();
    index_t* out_col = out.col_idx.data();
    double* out_val = out.values.data();
    std::uint64_t visits = 0;
    index_t nnz = 0;

    auto fill_row = [&](index_t bus, bool lower, index_t row) {
        const index_t nnz_row = nnz;
        index_t n_angle = 0, n_mag = 0;
        index_t* mag_col = stage_col.data() + max_row;
        double* mag_val = stage_val.data() + max_row;
        for (index_t k = y.row_ptr[bus]; k < y.row_ptr[bus + 1]; ++k) {
            const index_t col_bus = yj[k];
            const index_t j = lookup[col_bus];
            if (pvpq[j] != col_bus) continue;  // slack column
            const double dva = lower ? dva_x[k].imag() : dva_x[k].real();
            if (j < n_pv) {
                out_col[nnz] = j;
                out_val[nnz] = dva;
                ++nnz;
            } else {
                stage_col[n_angle] = j;
                stage_val[n_angle] = dva;
                ++n_angle;
                mag_col[n_mag] = n_pvpq + (j - n_pv);
                mag_val[n_mag] = lower ? dvm_x[k].imag() : dvm_x[k].real();
                ++n_mag;
            }
        }
        visits += y.row_ptr[bus + 1] - y.row_ptr[bus];
        for (index_t s = 0; s < n_angle; ++s) {
            out_col[nnz] = stage_col[s];
            out_val[nnz] = stage_val[s];
            ++nnz;
        }
        for (index_t s = 0; s < n_mag; ++s) {
            out_col[nnz] = mag_col[s];
            out_val[nnz] = mag_val[s];
            ++nnz;
        }
        out.row_ptr[row + 1] = nnz - nnz_row + out.row_ptr[row];
    };

    for (index_t row = 0; row < n_pvpq; ++row) fill_row(idx.pvpq[row], false, row);
    for (index_t row = 0; row < idx.n_pq; ++row)
        fill_row(idx.pq[row], true, n_pvpq + row);

    out.values.resize(nnz);
    out.col_idx.resize(nnz);
    count_visits(counters, visits);
    detail::debug_validate(out);
}

RealCRS create_jacobian_direct(const DerivativePair& d, const ComplexCRS& y,
                               const IndexSets& idx, OpCounters* counters) {
    RealCRS out;
    create_jacobian_direct(d, y, idx, out, counters);
    return out;
}

RealCRS create_jacobian_generic(const DerivativePair& d, const ComplexCRS& y,
                                const IndexSets& idx, OpCounters* counters) {
    check_inputs(d, y, idx);

    // Expand the data vectors back to full matrices on a copy of y's pattern.
    ComplexCRS dva_full, dvm_full;
    dva_full.n_rows = dvm_full.n_rows = y.n_rows;
    dva_full.n_cols = dvm_full.n_cols = y.n_cols;
    dva_full.col_idx = dvm_full.col_idx = y.col_idx;
    dva_full.row_ptr = dvm_full.row_ptr = y.row_ptr;
    dva_full.values = d.dva_x;
    dvm_full.values = d.dvm_x;
    count_pattern_alloc(counters);
    count_pattern_alloc(counters);
    count_visits(counters, 2 * y.values.size());

    const RealCRS j11 = crs_real(crs_submatrix(dva_full, idx.pvpq, idx.pvpq, counters), counters);
    const RealCRS j12 = crs_real(crs_submatrix(dvm_full, idx.pvpq, idx.pq, counters), counters);
    const RealCRS j21 = crs_imag(crs_submatrix(dva_full, idx.pq, idx.pvpq, counters), counters);
    const RealCRS j22 = crs_imag(crs_submatrix(dvm_full, idx.pq, idx.pq, counters), counters);
    return crs_block2x2(j11, j12, j21, j22, counters);
}

}  // namespace pflow
