#ifndef IMC_BASELINES_HPP
#define IMC_BASELINES_HPP

#include <utility>

#include "imc/gnimc.hpp"

namespace imc {

/// Alternating minimization with QR reduction: fixes Q_U and solves the
/// least-squares problem for V (via LSQR on the residual, so the observed
/// objective never increases), then symmetrically for U. Stopping criteria
/// shared with the Gauss-Newton solver.
std::pair<FactorPair, SolveReport> altmin_solve(const Problem& p, const FactorPair& init,
                                                const GnimcConfig& config,
                                                const Matrix* truth = nullptr);

/// One gradient step on f(U, V) = ||P_Omega(A U V^T B^T) - Y||_F^2; both
/// gradients are evaluated at the incoming iterate.
FactorPair gd_step(const Problem& p, const FactorPair& iterate, double step_size);

/// Gradient step with the imbalance penalty (lambda/4) ||U^T U - V^T V||_F^2.
FactorPair rgd_step(const Problem& p, const FactorPair& iterate, double step_size,
                    double lambda);

std::pair<FactorPair, SolveReport> gd_solve(const Problem& p, const FactorPair& init,
                                            const GnimcConfig& config, double step_size,
                                            const Matrix* truth = nullptr);

std::pair<FactorPair, SolveReport> rgd_solve(const Problem& p, const FactorPair& init,
                                             const GnimcConfig& config, double step_size,
                                             double lambda, const Matrix* truth = nullptr);

}  // namespace imc

#endif  // IMC_BASELINES_HPP
