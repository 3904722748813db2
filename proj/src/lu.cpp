#include "pflow/lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

/// Minimum-degree elimination order on the symmetrized pattern of a.
/// Ties break on the lower node index, so the order is deterministic. Once
/// the elimination graph densifies the pairwise merges stop paying for
/// themselves, so after a fixed work budget the remaining nodes are appended
/// by (degree, index) instead.
std::vector<index_t> min_degree_order(const RealCRS& a) {
    const index_t n = a.n_rows;
    std::vector<std::vector<index_t>> adj(n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const index_t j = a.col_idx[k];
            if (j == i) continue;
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    using Entry = std::pair<index_t, index_t>;  // (degree, node)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (index_t v = 0; v < n; ++v) heap.push({static_cast<index_t>(adj[v].size()), v});

    std::vector<char> eliminated(n, 0);
    std::vector<index_t> order;
    order.reserve(n);
    std::vector<index_t> live, merged;
    std::uint64_t budget = 128 * (a.values.size() + static_cast<std::uint64_t>(n));

    while (!heap.empty()) {
        auto [deg, v] = heap.top();
        heap.pop();
        if (eliminated[v] || deg != static_cast<index_t>(adj[v].size())) continue;
        eliminated[v] = 1;
        order.push_back(v);
        if (budget == 0) continue;  // dense tail: take nodes by degree as-is

        live = adj[v];
        adj[v].clear();
        adj[v].shrink_to_fit();

        // Connect the remaining neighbors of v pairwise.
        for (index_t u : live) {
            merged.clear();
            std::size_t a_it = 0, b_it = 0;
            const auto& cur = adj[u];
            const std::uint64_t work = cur.size() + live.size();
            budget = budget > work ? budget - work : 0;
            while (a_it < cur.size() || b_it < live.size()) {
                index_t ca = a_it < cur.size() ? cur[a_it] : std::numeric_limits<index_t>::max();
                index_t cb = b_it < live.size() ? live[b_it] : std::numeric_limits<index_t>::max();
                index_t c = std::min(ca, cb);
                if (ca == c) ++a_it;
                if (cb == c) ++b_it;
                if (c != u && c != v && !eliminated[c]) merged.push_back(c);
            }
            adj[u].swap(merged);
            heap.push({static_cast<index_t>(adj[u].size()), u});
        }
    }
    return order;
}

struct CSC {
    std::vector<index_t> ptr, row;
    std::vector<double> val;
};

CSC transpose_to_csc(const RealCRS& a) {
    const index_t n = a.n_rows;
    CSC c;
    c.ptr.assign(static_cast<std::size_t>(a.n_cols) + 1, 0);
    c.row.resize(a.values.size());
    c.val.resize(a.values.size());
    for (index_t col : a.col_idx) ++c.ptr[col + 1];
    for (index_t j = 0; j < a.n_cols; ++j) c.ptr[j + 1] += c.ptr[j];
    std::vector<index_t> next(c.ptr.begin(), c.ptr.end() - 1);
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const index_t dst = next[a.col_idx[k]]++;
            c.row[dst] = i;
            c.val[dst] = a.values[k];
        }
    }
    return c;
}

}  // namespace

SparseLU::SparseLU(const RealCRS& a) : a_(a) {
    if (a.n_rows != a.n_cols)
        throw StructureError("lu: matrix must be square, got " +
                             std::to_string(a.n_rows) + "x" + std::to_string(a.n_cols));
    detail::debug_validate(a_);
    n_ = a.n_rows;
    factor();
}

void SparseLU::factor() {
    const index_t n = n_;
    const CSC ac = transpose_to_csc(a_);
    col_order_ = min_degree_order(a_);

    double amax = 0.0;
    for (double v : a_.values) amax = std::max(amax, std::abs(v));
    const double tiny_pivot =
        amax * std::numeric_limits<double>::epsilon() * std::max<index_t>(n, 1);

    l_ptr_.assign(1, 0);
    u_ptr_.assign(1, 0);
    u_diag_.assign(n, 0.0);
    p_inv_.assign(n, -1);
    const std::size_t guess = 4 * a_.values.size() + n;
    l_idx_.reserve(guess);
    l_val_.reserve(guess);
    u_idx_.reserve(guess);
    u_val_.reserve(guess);

    std::vector<double> x(n, 0.0);
    std::vector<index_t> xi(n), dfs_stack(n), entry_pos(n);
    std::vector<int> stamp(n, -1);

    for (index_t k = 0; k < n; ++k) {
        const index_t col = col_order_[k];

        // Reachability of A[:,col] through the columns of L (depth first,
        // emitting reverse postorder into xi[top..n)).
        index_t top = n;
        for (index_t p = ac.ptr[col]; p < ac.ptr[col + 1]; ++p) {
            const index_t start = ac.row[p];
            if (stamp[start] == k) continue;
            index_t depth = 0;
            dfs_stack[0] = start;
            while (depth >= 0) {
                const index_t i = dfs_stack[depth];
                if (stamp[i] != k) {
                    stamp[i] = k;
                    entry_pos[i] = p_inv_[i] >= 0 ? l_ptr_[p_inv_[i]] : 0;
                }
                bool descended = false;
                if (p_inv_[i] >= 0) {
                    const index_t end = l_ptr_[p_inv_[i] + 1];
                    while (entry_pos[i] < end) {
                        const index_t child = l_idx_[entry_pos[i]++];
                        if (stamp[child] != k) {
                            dfs_stack[++depth] = child;
                            descended = true;
                            break;
                        }
                    }
                }
                if (!descended) {
                    xi[--top] = i;
                    --depth;
                }
            }
        }

        // Numeric sparse triangular solve x = L \ A[:,col].
        for (index_t p = top; p < n; ++p) x[xi[p]] = 0.0;
        for (index_t p = ac.ptr[col]; p < ac.ptr[col + 1]; ++p)
            x[ac.row[p]] = ac.val[p];
        for (index_t p = top; p < n; ++p) {
            const index_t i = xi[p];
            const index_t piv = p_inv_[i];
            if (piv < 0) continue;
            const double xi_val = x[i];
            for (index_t q = l_ptr_[piv]; q < l_ptr_[piv + 1]; ++q)
                x[l_idx_[q]] -= l_val_[q] * xi_val;
        }

        // Pivot: largest candidate among not-yet-pivotal rows, keeping the
        // diagonal when it is within a factor 10 of the maximum.
        index_t pivot_row = -1;
        double pivot_mag = -1.0;
        for (index_t p = top; p < n; ++p) {
            const index_t i = xi[p];
            if (p_inv_[i] >= 0) continue;
            const double mag = std::abs(x[i]);
            if (mag > pivot_mag || (mag == pivot_mag && i < pivot_row)) {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if (pivot_row < 0 || pivot_mag <= tiny_pivot)
            throw SingularError("lu: matrix is singular at pivot row " +
                                    std::to_string(col),
                                col);
        if (stamp[col] == k && p_inv_[col] < 0 && std::abs(x[col]) >= 0.1 * pivot_mag)
            pivot_row = col;

        const double pivot = x[pivot_row];
        p_inv_[pivot_row] = k;
        u_diag_[k] = pivot;

        for (index_t p = top; p < n; ++p) {
            const index_t i = xi[p];
            if (i == pivot_row) continue;
            if (p_inv_[i] >= 0) {
                u_idx_.push_back(p_inv_[i]);
                u_val_.push_back(x[i]);
            } else if (x[i] != 0.0) {
                l_idx_.push_back(i);  // original row index until the end
                l_val_.push_back(x[i] / pivot);
            }
        }
        l_ptr_.push_back(static_cast<index_t>(l_idx_.size()));
        u_ptr_.push_back(static_cast<index_t>(u_idx_.size()));
    }

    // Map L's row indices into pivot positions for the substitution phase.
    for (auto& i : l_idx_) i = p_inv_[i];
}

std::vector<double> SparseLU::solve_factored(std::span<const double> rhs) const {
    const index_t n = n_;
    std::vector<double> z(n);
    for (index_t i = 0; i < n; ++i) z[p_inv_[i]] = rhs[i];
    for (index_t k = 0; k < n; ++k) {
        const double zk = z[k];
        if (zk == 0.0) continue;
        for (index_t q = l_ptr_[k]; q < l_ptr_[k + 1]; ++q) z[l_idx_[q]] -= l_val_[q] * zk;
    }
    for (index_t k = n - 1; k >= 0; --k) {
        const double wk = z[k] / u_diag_[k];
        z[k] = wk;
        if (wk == 0.0) continue;
        for (index_t q = u_ptr_[k]; q < u_ptr_[k + 1]; ++q) z[u_idx_[q]] -= u_val_[q] * wk;
    }
    std::vector<double> x(n);
    for (index_t k = 0; k < n; ++k) x[col_order_[k]] = z[k];
    return x;
}

std::vector<double> SparseLU::solve(std::span<const double> rhs) const {
    if (static_cast<index_t>(rhs.size()) != n_)
        throw StructureError("lu: right-hand side length " + std::to_string(rhs.size()) +
                             " does not match dimension " + std::to_string(n_));
    if (n_ == 0) return {};

    std::vector<double> x = solve_factored(rhs);

    double rhs_norm = 0.0;
    for (double v : rhs) rhs_norm = std::max(rhs_norm, std::abs(v));
    const double target = 1e-10 * std::max(1.0, rhs_norm);

    // One step of iterative refinement when the raw residual is not already
    // comfortably inside the contract.
    std::vector<double> r(n_);
    auto residual = [&]() {
        double rmax = 0.0;
        for (index_t i = 0; i < n_; ++i) {
            double acc = rhs[i];
            for (index_t k = a_.row_ptr[i]; k < a_.row_ptr[i + 1]; ++k)
                acc -= a_.values[k] * x[a_.col_idx[k]];
            r[i] = acc;
            rmax = std::max(rmax, std::abs(acc));
        }
        return rmax;
    };
    if (residual() > 0.25 * target) {
        const std::vector<double> dx = solve_factored(r);
        for (index_t i = 0; i < n_; ++i) x[i] += dx[i];
    }
    return x;
}

std::vector<double> lu_solve(const RealCRS& a, std::span<const double> rhs) {
    return SparseLU(a).solve(rhs);
}

}  // namespace pflow
