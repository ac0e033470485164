#include "imc/rankest.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "imc/sensing.hpp"

namespace imc {
namespace {

std::vector<double> gaps_from_spectrum(const Vector& sigma, double d_const) {
  std::vector<double> gaps;
  gaps.reserve(sigma.size() > 0 ? sigma.size() - 1 : 0);
  for (Index i = 0; i + 1 < sigma.size(); ++i) {
    const double denom = sigma(i + 1) + d_const * sigma(0) * std::sqrt(static_cast<double>(i + 1));
    gaps.push_back(denom > 0.0 ? sigma(i) / denom
                               : std::numeric_limits<double>::infinity());
  }
  return gaps;
}

int argmax_smallest_index(const std::vector<double>& gaps) {
  int best = 0;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i] > gaps[best]) best = static_cast<int>(i);
  return best + 1;  // gaps[k] is g_{k+1}
}

}  // namespace

double default_d_const(Index d1, Index d2, std::size_t num_samples) {
  return std::sqrt(std::sqrt(static_cast<double>(d1) * static_cast<double>(d2)) /
                   static_cast<double>(num_samples));
}

RankEstimate estimate_rank(const SideInfo& side, const SampleSet& samples, const Vector& y,
                           std::optional<double> d_const) {
  if (samples.empty()) throw BadDims("estimate_rank: empty sample set");
  if (y.size() != static_cast<Index>(samples.size()))
    throw BadDims("estimate_rank: y length does not match omega");
  if (y.cwiseAbs().maxCoeff() == 0.0)
    throw ZeroObservation("estimate_rank: all observed values are zero");
  const double d = d_const.value_or(default_d_const(side.d1(), side.d2(), samples.size()));
  if (d < 0.0 || d >= 1.0) throw BadDims("estimate_rank: D must lie in [0, 1)");

  const SensingOp op(side, samples);
  const Matrix x_hat = op.backproject(y) / samples.sampling_rate();
  Eigen::BDCSVD<Matrix> svd(x_hat);

  RankEstimate est;
  est.d_const = d;
  est.sigma_hat = svd.singularValues();
  est.gaps = gaps_from_spectrum(est.sigma_hat, d);
  est.r_hat = argmax_smallest_index(est.gaps);
  return est;
}

std::vector<double> true_gaps(const Vector& spectrum, double d_const) {
  for (Index i = 0; i + 1 < spectrum.size(); ++i)
    if (spectrum(i) < spectrum(i + 1)) throw BadDims("true_gaps: spectrum must be descending");
  return gaps_from_spectrum(spectrum, d_const);
}

}  // namespace imc
