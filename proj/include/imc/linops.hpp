#ifndef IMC_LINOPS_HPP
#define IMC_LINOPS_HPP

#include <functional>
#include <utility>

#include "imc/common.hpp"

namespace imc {

/// Abstract linear operator L: R^cols -> R^rows with an adjoint.
///
/// Implementations must satisfy <L(x), y> = <x, Lt(y)> for all x, y;
/// adjoint_mismatch() measures the violation on random vectors.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual void apply(const Vector& x, Vector& y) const = 0;
  virtual void apply_adjoint(const Vector& y, Vector& x) const = 0;

  Vector apply(const Vector& x) const {
    Vector y(rows());
    apply(x, y);
    return y;
  }
  Vector apply_adjoint(const Vector& y) const {
    Vector x(cols());
    apply_adjoint(y, x);
    return x;
  }
};

/// Dense matrix wrapped as a LinearMap.
class DenseMap final : public LinearMap {
 public:
  explicit DenseMap(Matrix m) : m_(std::move(m)) {}
  Index rows() const override { return m_.rows(); }
  Index cols() const override { return m_.cols(); }
  void apply(const Vector& x, Vector& y) const override { y.noalias() = m_ * x; }
  void apply_adjoint(const Vector& y, Vector& x) const override {
    x.noalias() = m_.transpose() * y;
  }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Materializes a LinearMap column by column. Diagnostics and small
/// instances only.
Matrix dense_from(const LinearMap& op);

/// Largest relative adjoint identity violation over `trials` random pairs.
double adjoint_mismatch(const LinearMap& op, int trials, std::uint64_t seed);

struct QrResult {
  Matrix q;  // orthonormal columns
  Matrix r;  // upper triangular, nonnegative diagonal
};

/// Thin QR of an m x n matrix, m >= n, via Householder reflections.
/// Throws RankDeficient when the R diagonal collapses below
/// 1e-12 relative to its largest entry.
QrResult qr_thin(const Matrix& m);

struct SvdResult {
  Matrix u;
  Vector s;  // descending
  Matrix v;
};

/// Rank-k truncated SVD. Computed from a full dense decomposition; the
/// sizes handled here are at most a few hundred per side.
SvdResult svd_truncated(const Matrix& m, Index k);

struct LsqrResult {
  Vector x;
  int iters = 0;
  double residual_norm = 0.0;  // ||op(x) - b||
};

struct LsqrOptions {
  int max_iters = 1000;
  double tol = 1e-12;  // relative; applied to both residual and normal residual
};

/// LSQR (Paige & Saunders) started from zero, so the returned iterate has
/// no component in ker(op) and approximates the minimal-norm least-squares
/// solution. Throws NonFinite if the bidiagonalization breaks down.
LsqrResult lsqr_min_norm(const LinearMap& op, const Vector& b, const LsqrOptions& opts);

inline LsqrResult lsqr_min_norm(const LinearMap& op, const Vector& b, int max_iters,
                                double tol = 1e-12) {
  return lsqr_min_norm(op, b, LsqrOptions{max_iters, tol});
}

}  // namespace imc

#endif  // IMC_LINOPS_HPP
