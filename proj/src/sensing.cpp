#include "imc/sensing.hpp"

#include <cmath>

#include "imc/linops.hpp"
#include "imc/rng.hpp"

namespace imc {

SensingOp::SensingOp(const SideInfo& side, const SampleSet& samples)
    : samples_(&samples) {
  if (samples.empty()) throw BadDims("SensingOp: empty sample set");
  if (samples.n1 != side.n1() || samples.n2 != side.n2())
    throw BadDims("SensingOp: sample grid does not match side information");
  const Index m = static_cast<Index>(samples.size());
  a_rows_.resize(m, side.d1());
  b_rows_.resize(m, side.d2());
  for (Index k = 0; k < m; ++k) {
    a_rows_.row(k) = side.a.row(samples.rows[k]);
    b_rows_.row(k) = side.b.row(samples.cols[k]);
  }
  scale_ = 1.0 / std::sqrt(samples.sampling_rate());
}

Vector SensingOp::apply(const Matrix& m) const {
  if (m.rows() != input_rows() || m.cols() != input_cols())
    throw BadDims("SensingOp::apply: shape mismatch");
  return scale_ * fitted_values_dense(m);
}

Vector SensingOp::apply_factored(const Matrix& u, const Matrix& v) const {
  return scale_ * fitted_values(u, v);
}

Matrix SensingOp::apply_adjoint(const Vector& y) const {
  if (y.size() != static_cast<Index>(num_samples()))
    throw BadDims("SensingOp::apply_adjoint: length mismatch");
  return scale_ * backproject(y);
}

Vector SensingOp::fitted_values(const Matrix& u, const Matrix& v) const {
  const Matrix au = a_rows_ * u;  // m x r
  const Matrix bv = b_rows_ * v;  // m x r
  return (au.array() * bv.array()).rowwise().sum().matrix();
}

Vector SensingOp::fitted_values_dense(const Matrix& m) const {
  const Matrix am = a_rows_ * m;
  return (am.array() * b_rows_.array()).rowwise().sum().matrix();
}

Matrix SensingOp::backproject(const Vector& e) const {
  // sum_k e_k a_{i_k} b_{j_k}^T without forming the sparse n1 x n2 matrix.
  return a_rows_.transpose() * (b_rows_.array().colwise() * e.array()).matrix();
}

Matrix project_ab(const SideInfo& side, const Matrix& x) {
  if (x.rows() != side.n1() || x.cols() != side.n2())
    throw BadDims("project_ab: shape mismatch");
  return side.a * (side.a.transpose() * x * side.b) * side.b.transpose();
}

RipProbeReport rip_probe(const SensingOp& op, int rank_tested, int trials,
                         std::uint64_t seed, double test_kappa) {
  const Index kmax = std::min(op.input_rows(), op.input_cols());
  if (rank_tested < 1 || rank_tested > kmax)
    throw BadDims("rip_probe: rank_tested out of range");
  if (trials < 1) throw BadDims("rip_probe: need at least one trial");

  Rng rng = make_rng(seed);
  RipProbeReport report;
  report.trials = trials;
  report.rank_tested = rank_tested;
  report.ratios.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    Matrix m;
    if (test_kappa > 0.0) {
      const Matrix qu = qr_thin(gaussian_matrix(op.input_rows(), rank_tested, rng)).q;
      const Matrix qv = qr_thin(gaussian_matrix(op.input_cols(), rank_tested, rng)).q;
      Vector spec(rank_tested);
      for (int i = 0; i < rank_tested; ++i)
        spec(i) = rank_tested == 1
                      ? 1.0
                      : test_kappa + (1.0 - test_kappa) * static_cast<double>(i) / (rank_tested - 1);
      m = qu * spec.asDiagonal() * qv.transpose();
    } else {
      m = gaussian_matrix(op.input_rows(), rank_tested, rng) *
          gaussian_matrix(op.input_cols(), rank_tested, rng).transpose();
    }
    m /= m.norm();
    const double ratio = op.apply(m).squaredNorm();
    report.ratios.push_back(ratio);
    report.delta_hat = std::max(report.delta_hat, std::abs(ratio - 1.0));
  }
  return report;
}

}  // namespace imc
