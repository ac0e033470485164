#ifndef IMC_SENSING_HPP
#define IMC_SENSING_HPP

#include <cstdint>
#include <vector>

#include "imc/problem.hpp"

namespace imc {

/// The sensing operator A(M) = Vec_Omega(A M B^T) / sqrt(p) and its
/// adjoint, evaluated entrywise from gathered feature rows so the n1 x n2
/// product is never materialized.
class SensingOp {
 public:
  SensingOp(const SideInfo& side, const SampleSet& samples);

  Index input_rows() const { return a_rows_.cols(); }   // d1
  Index input_cols() const { return b_rows_.cols(); }   // d2
  std::size_t num_samples() const { return samples_->size(); }
  double sampling_rate() const { return samples_->sampling_rate(); }
  double scale() const { return scale_; }  // 1/sqrt(p)

  /// Rows of A and B gathered at the sample indices, m x d1 and m x d2.
  const Matrix& a_rows() const { return a_rows_; }
  const Matrix& b_rows() const { return b_rows_; }

  /// y_k = a_{i_k}^T M b_{j_k} / sqrt(p).
  Vector apply(const Matrix& m) const;

  /// Fast path for factored M = U V^T; O(d1 r + d2 r + r) per entry.
  Vector apply_factored(const Matrix& u, const Matrix& v) const;

  /// A^T P*_Omega(y) B / sqrt(p), the adjoint of apply().
  Matrix apply_adjoint(const Vector& y) const;

  /// Unscaled fitted values Vec_Omega(A U V^T B^T), shared by the solvers.
  Vector fitted_values(const Matrix& u, const Matrix& v) const;

  /// Unscaled Vec_Omega(A M B^T) for a dense M.
  Vector fitted_values_dense(const Matrix& m) const;

  /// Unscaled gradient-style backprojection A^T P*_Omega(e) B.
  Matrix backproject(const Vector& e) const;

 private:
  const SampleSet* samples_;
  Matrix a_rows_;
  Matrix b_rows_;
  double scale_;
};

/// P_AB(X) = A A^T X B B^T, the projector onto the feature subspaces.
Matrix project_ab(const SideInfo& side, const Matrix& x);

struct RipProbeReport {
  double delta_hat = 0.0;       // max |ratio - 1| over trials
  int trials = 0;
  int rank_tested = 0;
  std::vector<double> ratios;   // ||A(M)||^2 / ||M||_F^2 per trial
};

/// Samples random rank-`rank_tested` matrices (Gaussian factors, unit
/// Frobenius norm) and records how far the sensing operator is from an
/// isometry on them. A lower-bound witness of the restricted isometry
/// constant, not a certificate. `test_kappa` > 0 prescribes the condition
/// number of the probe matrices instead of Gaussian spectra.
RipProbeReport rip_probe(const SensingOp& op, int rank_tested, int trials,
                         std::uint64_t seed, double test_kappa = 0.0);

}  // namespace imc

#endif  // IMC_SENSING_HPP
