#pragma once

#include <span>
#include <vector>

#include "pflow/crs.hpp"

namespace pflow {

/// Sparse direct LU factorization of a square matrix: minimum-degree column
/// preordering on the symmetrized pattern, left-looking factorization with
/// threshold partial pivoting (diagonal preferred), triangular substitution
/// plus one step of iterative refinement. Deterministic for fixed input.
class SparseLU {
  public:
    explicit SparseLU(const RealCRS& a);

    std::vector<double> solve(std::span<const double> rhs) const;
    std::vector<double> solve(const std::vector<double>& rhs) const {
        return solve(std::span<const double>(rhs));
    }

  private:
    index_t n_ = 0;
    // L and U in compressed column form; L has unit diagonal (implicit).
    std::vector<index_t> l_ptr_, l_idx_, u_ptr_, u_idx_;
    std::vector<double> l_val_, u_val_, u_diag_;
    std::vector<index_t> p_inv_;      // original row -> pivot position
    std::vector<index_t> col_order_;  // column elimination order
    RealCRS a_;                       // kept for the refinement residual

    void factor();
    std::vector<double> solve_factored(std::span<const double> rhs) const;
};

/// Solves a*x = rhs with a direct factorization; the result satisfies
/// ||a*x - rhs||_inf <= 1e-10 * max(1, ||rhs||_inf) for numerically sane
/// systems. Throws SingularError naming the pivot row when the matrix is
/// structurally or numerically singular.
std::vector<double> lu_solve(const RealCRS& a, std::span<const double> rhs);

inline std::vector<double> lu_solve(const RealCRS& a, const std::vector<double>& rhs) {
    return lu_solve(a, std::span<const double>(rhs));
}

}  // namespace pflow
