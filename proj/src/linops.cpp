#include "imc/linops.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "imc/rng.hpp"

namespace imc {

Matrix dense_from(const LinearMap& op) {
  Matrix d(op.rows(), op.cols());
  Vector e = Vector::Zero(op.cols());
  Vector col(op.rows());
  for (Index j = 0; j < op.cols(); ++j) {
    e(j) = 1.0;
    op.apply(e, col);
    d.col(j) = col;
    e(j) = 0.0;
  }
  return d;
}

double adjoint_mismatch(const LinearMap& op, int trials, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector x = gaussian_vector(op.cols(), rng);
    Vector y = gaussian_vector(op.rows(), rng);
    const double lhs = op.apply(x).dot(y);
    const double rhs = x.dot(op.apply_adjoint(y));
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

QrResult qr_thin(const Matrix& m) {
  if (m.rows() < m.cols()) throw BadDims("qr_thin: need rows >= cols");
  const Index n = m.cols();
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), n);
  Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  // Fix signs so the R diagonal is nonnegative; keeps outputs reproducible.
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) {
      r.row(j) = -r.row(j);
      q.col(j) = -q.col(j);
    }
  }
  const double dmax = r.diagonal().cwiseAbs().maxCoeff();
  const double dmin = r.diagonal().cwiseAbs().minCoeff();
  if (dmax <= 0.0 || dmin <= 1e-12 * dmax)
    throw RankDeficient("qr_thin: numerically rank-deficient input");
  return {std::move(q), std::move(r)};
}

SvdResult svd_truncated(const Matrix& m, Index k) {
  if (k < 1 || k > std::min(m.rows(), m.cols()))
    throw BadDims("svd_truncated: rank out of range");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = svd.matrixU().leftCols(k);
  out.s = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);
  return out;
}

LsqrResult lsqr_min_norm(const LinearMap& op, const Vector& b, const LsqrOptions& opts) {
  if (b.size() != op.rows()) throw BadDims("lsqr_min_norm: rhs dimension mismatch");
  if (opts.tol <= 0.0) throw BadDims("lsqr_min_norm: tol must be positive");

  LsqrResult out;
  out.x = Vector::Zero(op.cols());

  double beta = b.norm();
  if (beta == 0.0) return out;

  Vector u = b / beta;
  Vector v(op.cols());
  op.apply_adjoint(u, v);
  double alpha = v.norm();
  if (alpha == 0.0) {
    out.residual_norm = beta;
    return out;  // b orthogonal to the range; x = 0 is optimal
  }
  v /= alpha;
  Vector w = v;

  double phibar = beta;
  double rhobar = alpha;
  const double bnorm = beta;
  double anorm2 = alpha * alpha;

  Vector tmp_m(op.rows());
  Vector tmp_n(op.cols());

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    // Golub-Kahan bidiagonalization step.
    op.apply(v, tmp_m);
    u = tmp_m - alpha * u;
    beta = u.norm();
    if (beta > 0.0) u /= beta;

    op.apply_adjoint(u, tmp_n);
    v = tmp_n - beta * v;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;

    anorm2 += alpha * alpha + beta * beta;

    // Givens rotation eliminating beta from the lower bidiagonal.
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    out.x += (phi / rho) * w;
    w = v - (theta / rho) * w;
    out.iters = iter;

    if (!std::isfinite(phibar) || !std::isfinite(rhobar) || !out.x.allFinite())
      throw NonFinite("lsqr_min_norm: iteration produced non-finite values");

    const double rnorm = phibar;                           // ||b - op(x)||
    const double arnorm = phibar * alpha * std::abs(c);    // ||op'(b - op(x))||
    const double anorm = std::sqrt(anorm2);
    if (rnorm <= opts.tol * bnorm) break;
    if (arnorm <= opts.tol * anorm * std::max(rnorm, 1e-300)) break;
    if (alpha == 0.0 || beta == 0.0) break;
  }
  out.residual_norm = phibar;
  return out;
}

}  // namespace imc
