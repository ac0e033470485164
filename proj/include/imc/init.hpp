#ifndef IMC_INIT_HPP
#define IMC_INIT_HPP

#include "imc/problem.hpp"

namespace imc {

/// Iterated projected gradient from M_0 = 0:
///   M_{tau+1} = trunc_r[ M_tau - A^T (P_Omega(A M_tau B^T) - Y) B / p ].
/// The step size is 1.
Matrix projected_gradient_init(const Problem& p, int num_iters);

/// Splits a matrix into perfectly balanced factors via its rank-r
/// truncated SVD: (U sqrt(S), V sqrt(S)). The product of the outputs is
/// the rank-r truncation of the input.
FactorPair balanced_split(const Matrix& m, int r);

/// One projected gradient step from zero, split into balanced factors:
/// the shared starting point for all solvers.
FactorPair spectral_init(const Problem& p);

}  // namespace imc

#endif  // IMC_INIT_HPP
