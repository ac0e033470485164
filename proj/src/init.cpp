#include "imc/init.hpp"

#include <cmath>

#include "imc/linops.hpp"
#include "imc/sensing.hpp"

namespace imc {

Matrix projected_gradient_init(const Problem& p, int num_iters) {
  if (num_iters < 1) throw BadDims("projected_gradient_init: num_iters must be >= 1");
  if (!p.observed()) throw BadDims("projected_gradient_init: problem has no observations");

  const SensingOp op(p.side, p.samples);
  const double inv_p = 1.0 / p.samples.sampling_rate();
  Matrix m = Matrix::Zero(p.d1(), p.d2());
  for (int tau = 0; tau < num_iters; ++tau) {
    const Vector residual = op.fitted_values_dense(m) - p.y;
    const Matrix grad = op.backproject(residual) * inv_p;
    const SvdResult svd = svd_truncated(m - grad, p.r);
    m.noalias() = svd.u * svd.s.asDiagonal() * svd.v.transpose();
  }
  return m;
}

FactorPair balanced_split(const Matrix& m, int r) {
  if (r < 1 || r > std::min(m.rows(), m.cols()))
    throw BadDims("balanced_split: rank out of range");
  const SvdResult svd = svd_truncated(m, r);
  const Vector root = svd.s.cwiseSqrt();
  return {svd.u * root.asDiagonal(), svd.v * root.asDiagonal()};
}

FactorPair spectral_init(const Problem& p) {
  return balanced_split(projected_gradient_init(p, 1), p.r);
}

}  // namespace imc
