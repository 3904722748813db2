#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pflow/counters.hpp"
#include "pflow/errors.hpp"

namespace pflow {

using index_t = std::int32_t;
using cplx = std::complex<double>;

template <typename Scalar>
struct Triplet {
    index_t row = 0;
    index_t col = 0;
    Scalar value{};
};

/// Sparse matrix in compressed row storage: values, column indices and a
/// row pointer of length n_rows + 1 with row_ptr[0] = 0 and
/// row_ptr[n_rows] = nnz. Column indices are strictly ascending within each
/// row. An n x n matrix stores 2*nnz + n + 1 scalars in total.
///
/// Instances are immutable after construction and safe to share across
/// threads; construction itself is single-threaded.
template <typename Scalar>
struct CRS {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<Scalar> values;
    std::vector<index_t> col_idx;
    std::vector<index_t> row_ptr{0};

    CRS() = default;

    /// Empty matrix of the given shape (all rows empty).
    CRS(index_t rows, index_t cols)
        : n_rows(rows), n_cols(cols), row_ptr(static_cast<std::size_t>(rows) + 1, 0) {}

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    /// Scalars held across the three arrays; 2*nnz + n_rows + 1 by invariant.
    std::size_t stored_scalars() const {
        return values.size() + col_idx.size() + row_ptr.size();
    }

    /// Checks all structural invariants, throws StructureError on breach.
    void validate() const {
        if (n_rows < 0 || n_cols < 0)
            throw StructureError("crs: negative dimension");
        if (row_ptr.size() != static_cast<std::size_t>(n_rows) + 1)
            throw StructureError("crs: row_ptr length must be n_rows + 1");
        if (row_ptr.front() != 0)
            throw StructureError("crs: row_ptr[0] must be 0");
        if (row_ptr.back() != static_cast<index_t>(values.size()))
            throw StructureError("crs: row_ptr[n_rows] must equal nnz");
        if (values.size() != col_idx.size())
            throw StructureError("crs: values and col_idx length mismatch");
        for (index_t i = 0; i < n_rows; ++i) {
            if (row_ptr[i] > row_ptr[i + 1])
                throw StructureError("crs: row_ptr must be non-decreasing at row " +
                                     std::to_string(i));
            for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                if (col_idx[k] < 0 || col_idx[k] >= n_cols)
                    throw StructureError("crs: column index out of range in row " +
                                         std::to_string(i));
                if (k > row_ptr[i] && col_idx[k - 1] >= col_idx[k])
                    throw StructureError("crs: columns not strictly ascending in row " +
                                         std::to_string(i));
            }
        }
    }
};

using ComplexCRS = CRS<cplx>;
using RealCRS = CRS<double>;

namespace detail {

#ifndef NDEBUG
template <typename Scalar>
inline void debug_validate(const CRS<Scalar>& m) { m.validate(); }
#else
template <typename Scalar>
inline void debug_validate(const CRS<Scalar>&) {}
#endif

}  // namespace detail

/// Builds a CRS matrix from (row, col, value) entries. Duplicate positions
/// are summed; entries whose summed value is exactly zero are dropped.
template <typename Scalar>
CRS<Scalar> crs_from_triplets(std::vector<Triplet<Scalar>> entries,
                              index_t n_rows, index_t n_cols) {
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
            throw StructureError("crs_from_triplets: index (" + std::to_string(t.row) +
                                 ", " + std::to_string(t.col) + ") out of range for " +
                                 std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CRS<Scalar> out(n_rows, n_cols);
    out.values.reserve(entries.size());
    out.col_idx.reserve(entries.size());
    std::size_t k = 0;
    for (index_t i = 0; i < n_rows; ++i) {
        while (k < entries.size() && entries[k].row == i) {
            Scalar sum = entries[k].value;
            const index_t col = entries[k].col;
            ++k;
            while (k < entries.size() && entries[k].row == i && entries[k].col == col) {
                sum += entries[k].value;
                ++k;
            }
            if (sum != Scalar{}) {
                out.values.push_back(sum);
                out.col_idx.push_back(col);
            }
        }
        out.row_ptr[i + 1] = static_cast<index_t>(out.values.size());
    }
    detail::debug_validate(out);
    return out;
}

template <typename Scalar>
std::vector<Triplet<Scalar>> crs_to_triplets(const CRS<Scalar>& m) {
    std::vector<Triplet<Scalar>> out;
    out.reserve(m.values.size());
    for (index_t i = 0; i < m.n_rows; ++i)
        for (index_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            out.push_back({i, m.col_idx[k], m.values[k]});
    return out;
}

/// Dense row-major expansion, intended for tests and small matrices.
template <typename Scalar>
std::vector<std::vector<Scalar>> crs_to_dense(const CRS<Scalar>& m) {
    std::vector<std::vector<Scalar>> out(
        static_cast<std::size_t>(m.n_rows),
        std::vector<Scalar>(static_cast<std::size_t>(m.n_cols), Scalar{}));
    for (index_t i = 0; i < m.n_rows; ++i)
        for (index_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            out[i][m.col_idx[k]] = m.values[k];
    return out;
}

/// out[i] = sum_k values[k] * v[col_idx[k]] over row i's range.
template <typename Scalar>
std::vector<Scalar> crs_matvec(const CRS<Scalar>& m, std::span<const Scalar> v,
                               OpCounters* counters = nullptr) {
    if (static_cast<index_t>(v.size()) != m.n_cols)
        throw StructureError("crs_matvec: vector length " + std::to_string(v.size()) +
                             " does not match n_cols " + std::to_string(m.n_cols));
    std::vector<Scalar> out(static_cast<std::size_t>(m.n_rows), Scalar{});
    for (index_t i = 0; i < m.n_rows; ++i) {
        Scalar acc{};
        for (index_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            acc += m.values[k] * v[m.col_idx[k]];
        out[i] = acc;
    }
    count_visits(counters, m.values.size());
    return out;
}

template <typename Scalar>
std::vector<Scalar> crs_matvec(const CRS<Scalar>& m, const std::vector<Scalar>& v,
                               OpCounters* counters = nullptr) {
    return crs_matvec(m, std::span<const Scalar>(v), counters);
}

namespace detail {

inline void check_selection(std::span<const index_t> sel, index_t bound,
                            const char* what) {
    std::vector<char> seen(static_cast<std::size_t>(bound), 0);
    for (index_t s : sel) {
        if (s < 0 || s >= bound)
            throw StructureError(std::string("crs_submatrix: ") + what + " index " +
                                 std::to_string(s) + " out of range");
        if (seen[s])
            throw StructureError(std::string("crs_submatrix: duplicate ") + what +
                                 " index " + std::to_string(s));
        seen[s] = 1;
    }
}

}  // namespace detail

/// out[a][b] = m[rows[a]][cols[b]]. The cols sequence defines the output
/// column order; stored entries are kept even when their value is zero.
template <typename Scalar>
CRS<Scalar> crs_submatrix(const CRS<Scalar>& m, std::span<const index_t> rows,
                          std::span<const index_t> cols,
                          OpCounters* counters = nullptr) {
    detail::check_selection(rows, m.n_rows, "row");
    detail::check_selection(cols, m.n_cols, "column");

    std::vector<index_t> col_pos(static_cast<std::size_t>(m.n_cols), -1);
    for (std::size_t b = 0; b < cols.size(); ++b)
        col_pos[cols[b]] = static_cast<index_t>(b);

    CRS<Scalar> out(static_cast<index_t>(rows.size()), static_cast<index_t>(cols.size()));
    std::vector<std::pair<index_t, Scalar>> row_buf;
    std::uint64_t visits = 0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
        row_buf.clear();
        const index_t r = rows[a];
        for (index_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            ++visits;
            const index_t b = col_pos[m.col_idx[k]];
            if (b >= 0) row_buf.emplace_back(b, m.values[k]);
        }
        std::sort(row_buf.begin(), row_buf.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [b, val] : row_buf) {
            out.col_idx.push_back(b);
            out.values.push_back(val);
        }
        out.row_ptr[a + 1] = static_cast<index_t>(out.values.size());
    }
    count_visits(counters, visits + out.values.size());
    count_pattern_alloc(counters);
    detail::debug_validate(out);
    return out;
}

template <typename Scalar>
CRS<Scalar> crs_submatrix(const CRS<Scalar>& m, const std::vector<index_t>& rows,
                          const std::vector<index_t>& cols,
                          OpCounters* counters = nullptr) {
    return crs_submatrix(m, std::span<const index_t>(rows),
                         std::span<const index_t>(cols), counters);
}

/// Stacks four conforming blocks [[j11, j12], [j21, j22]] into one matrix.
inline RealCRS crs_block2x2(const RealCRS& j11, const RealCRS& j12,
                            const RealCRS& j21, const RealCRS& j22,
                            OpCounters* counters = nullptr) {
    if (j11.n_rows != j12.n_rows || j21.n_rows != j22.n_rows ||
        j11.n_cols != j21.n_cols || j12.n_cols != j22.n_cols)
        throw StructureError("crs_block2x2: block dimensions do not conform");

    const index_t upper = j11.n_rows, lower = j21.n_rows;
    const index_t left = j11.n_cols, right = j12.n_cols;
    RealCRS out(upper + lower, left + right);
    out.values.reserve(static_cast<std::size_t>(j11.nnz()) + j12.nnz() + j21.nnz() + j22.nnz());
    out.col_idx.reserve(out.values.capacity());

    auto emit_row = [&](const RealCRS& a, const RealCRS& b, index_t i) {
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            out.col_idx.push_back(a.col_idx[k]);
            out.values.push_back(a.values[k]);
        }
        for (index_t k = b.row_ptr[i]; k < b.row_ptr[i + 1]; ++k) {
            out.col_idx.push_back(b.col_idx[k] + left);
            out.values.push_back(b.values[k]);
        }
    };
    for (index_t i = 0; i < upper; ++i) {
        emit_row(j11, j12, i);
        out.row_ptr[i + 1] = static_cast<index_t>(out.values.size());
    }
    for (index_t i = 0; i < lower; ++i) {
        emit_row(j21, j22, i);
        out.row_ptr[upper + i + 1] = static_cast<index_t>(out.values.size());
    }
    count_visits(counters, 2 * out.values.size());
    count_pattern_alloc(counters);
    detail::debug_validate(out);
    return out;
}

/// Pattern-preserving real-part extraction (stored zeros are kept).
inline RealCRS crs_real(const ComplexCRS& m, OpCounters* counters = nullptr) {
    RealCRS out;
    out.n_rows = m.n_rows;
    out.n_cols = m.n_cols;
    out.col_idx = m.col_idx;
    out.row_ptr = m.row_ptr;
    out.values.resize(m.values.size());
    for (std::size_t k = 0; k < m.values.size(); ++k) out.values[k] = m.values[k].real();
    count_visits(counters, m.values.size());
    count_pattern_alloc(counters);
    return out;
}

/// Pattern-preserving imaginary-part extraction.
inline RealCRS crs_imag(const ComplexCRS& m, OpCounters* counters = nullptr) {
    RealCRS out;
    out.n_rows = m.n_rows;
    out.n_cols = m.n_cols;
    out.col_idx = m.col_idx;
    out.row_ptr = m.row_ptr;
    out.values.resize(m.values.size());
    for (std::size_t k = 0; k < m.values.size(); ++k) out.values[k] = m.values[k].imag();
    count_visits(counters, m.values.size());
    count_pattern_alloc(counters);
    return out;
}

}  // namespace pflow
