// Independent dense reference implementations used as oracles: everything
// here works on dense arrays with straightforward algebra and shares no code
// with the sparse paths it checks.

#pragma once

#include <complex>
#include <vector>

#include "pflow/case.hpp"
#include "pflow/crs.hpp"
#include "pflow/network.hpp"

namespace oracle {

using pflow::cplx;
using Dense = std::vector<std::vector<cplx>>;
using DenseReal = std::vector<std::vector<double>>;

/// Dense admittance matrix assembled directly from the branch model.
Dense dense_ybus(const pflow::ValidatedCase& vc);

struct DenseDerivatives {
    Dense dvm;
    Dense dva;
    std::vector<cplx> ibus;
};

/// Evaluates dVm = d(V) (Y d(V_norm))^* + d(conj(I) V_norm) and
/// dVa = j d(V) (d(I) - Y d(V))^* on dense arrays.
DenseDerivatives dense_derivatives(const Dense& y, const std::vector<cplx>& v);

/// Dense Jacobian by block selection from the dense derivative matrices.
DenseReal dense_jacobian(const DenseDerivatives& d, const pflow::IndexSets& idx);

/// Gaussian elimination with partial pivoting; throws on zero pivot.
std::vector<double> dense_solve(DenseReal a, std::vector<double> b);

struct DenseNR {
    std::vector<double> vm;
    std::vector<double> va;
    bool converged = false;
    int iterations = 0;
};

/// Full dense Newton-Raphson, iterated to a tight tolerance.
DenseNR dense_newton_raphson(const pflow::ValidatedCase& vc, double tol = 1e-12,
                             int max_iter = 40);

/// Central-difference Jacobian of the mismatch vector with step h, evaluated
/// through the production mismatch path.
DenseReal fd_jacobian(const pflow::ComplexCRS& y, const pflow::IndexSets& idx,
                      const std::vector<cplx>& s_sched, std::vector<double> vm,
                      std::vector<double> va, double h = 1e-6);

}  // namespace oracle
