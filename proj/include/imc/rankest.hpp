#ifndef IMC_RANKEST_HPP
#define IMC_RANKEST_HPP

#include <optional>
#include <vector>

#include "imc/problem.hpp"

namespace imc {

struct RankEstimate {
  int r_hat = 0;
  std::vector<double> gaps;  // g_i for i = 1 .. min(d1,d2)-1
  double d_const = 0.0;
  Vector sigma_hat;          // singular values of P_AB(Y)/p, descending
};

/// Spectral-gap rank estimate from the observed entries. Forms
/// X_hat = A^T P*_Omega(y) B / p in feature coordinates (its spectrum
/// equals that of P_AB(Y)/p since A, B are isometries) and maximizes
/// g_i = sigma_i / (sigma_{i+1} + D sigma_1 sqrt(i)). Ties and infinite
/// gaps resolve to the smallest index. Default D = (sqrt(d1 d2)/|Omega|)^{1/2}.
RankEstimate estimate_rank(const SideInfo& side, const SampleSet& samples, const Vector& y,
                           std::optional<double> d_const = std::nullopt);

/// The same gap statistic evaluated on an exact spectrum.
std::vector<double> true_gaps(const Vector& spectrum, double d_const);

double default_d_const(Index d1, Index d2, std::size_t num_samples);

}  // namespace imc

#endif  // IMC_RANKEST_HPP
