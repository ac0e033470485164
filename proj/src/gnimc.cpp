#include "imc/gnimc.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>

#include "imc/rng.hpp"

namespace imc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double min_sv_ratio(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
}

struct StepResult {
  FactorPair next;
  int inner_iters = 0;
};

StepResult step_impl(const SensingOp& op, const Vector& y, const FactorPair& iterate,
                     const GnimcConfig& config, int inner_cap) {
  const Index d1 = iterate.u.rows();
  const Index d2 = iterate.v.rows();
  const Index r = iterate.u.cols();

  const QrResult qru = qr_thin(iterate.u);
  const QrResult qrv = qr_thin(iterate.v);
  const GnimcLsMap ls(op, qru.q, qrv.q);

  const Vector residual = y - op.fitted_values(iterate.u, iterate.v);
  const LsqrResult sol =
      lsqr_min_norm(ls, residual, LsqrOptions{inner_cap, config.inner_tol});

  const Eigen::Map<const Matrix> du_pre(sol.x.data(), d1, r);
  const Eigen::Map<const Matrix> dv_pre(sol.x.data() + d1 * r, d2, r);

  // Undo the preconditioning: a feasible step for the original problem.
  Matrix du = qrv.r.triangularView<Eigen::Upper>()
                  .solve(du_pre.transpose())
                  .transpose();
  Matrix dv = qru.r.triangularView<Eigen::Upper>()
                  .solve(dv_pre.transpose())
                  .transpose();

  if (config.min_norm_projection_enabled) {
    // Remove the component along span{(Q_U R, -Q_V R^T)}.
    const Matrix c = qru.q.transpose() * du;
    const Matrix d = qrv.q.transpose() * dv;
    const Matrix w = 0.5 * (c - d.transpose());
    du.noalias() -= qru.q * w;
    dv.noalias() += qrv.q * w.transpose();
  }

  if (!du.allFinite() || !dv.allFinite())
    throw NonFinite("gnimc_step: update is not finite");
  return {{iterate.u + du, iterate.v + dv}, sol.iters};
}

}  // namespace

void GnimcConfig::validate() const {
  if (max_outer_iters < 1) throw BadDims("GnimcConfig: max_outer_iters must be >= 1");
  if (stop_eps <= 0.0) throw BadDims("GnimcConfig: stop_eps must be positive");
  if (inner_iters_low_error < 1 || inner_iters_high_error < 1)
    throw BadDims("GnimcConfig: inner iteration caps must be >= 1");
  if (low_error_threshold <= 0.0)
    throw BadDims("GnimcConfig: low_error_threshold must be positive");
  if (inner_tol <= 0.0) throw BadDims("GnimcConfig: inner_tol must be positive");
  if (trace_stride < 1) throw BadDims("GnimcConfig: trace_stride must be >= 1");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::ObservedResidualSmall: return "ObservedResidualSmall";
    case Termination::EstimateChangeSmall: return "EstimateChangeSmall";
    case Termination::MaxIters: return "MaxIters";
    case Termination::InnerFailure: return "InnerFailure";
  }
  return "Unknown";
}

GnimcLsMap::GnimcLsMap(const SensingOp& op, const Matrix& qu, const Matrix& qv)
    : op_(&op), qu_(qu), qv_(qv) {
  if (qu.rows() != op.input_rows() || qv.rows() != op.input_cols() ||
      qu.cols() != qv.cols())
    throw BadDims("GnimcLsMap: factor shapes do not match the operator");
  aqu_.noalias() = op.a_rows() * qu_;  // m x r
  bqv_.noalias() = op.b_rows() * qv_;  // m x r
}

Index GnimcLsMap::rows() const { return static_cast<Index>(op_->num_samples()); }

Index GnimcLsMap::cols() const {
  return (qu_.rows() + qv_.rows()) * qu_.cols();
}

void GnimcLsMap::apply(const Vector& x, Vector& y) const {
  const Index d1 = qu_.rows();
  const Index d2 = qv_.rows();
  const Index r = qu_.cols();
  const Eigen::Map<const Matrix> du(x.data(), d1, r);
  const Eigen::Map<const Matrix> dv(x.data() + d1 * r, d2, r);
  // Vec_Omega(A dU Q_V^T B^T) + Vec_Omega(A Q_U dV^T B^T), entrywise.
  y = ((op_->a_rows() * du).array() * bqv_.array()).rowwise().sum() +
      (aqu_.array() * (op_->b_rows() * dv).array()).rowwise().sum();
}

void GnimcLsMap::apply_adjoint(const Vector& y, Vector& x) const {
  const Index d1 = qu_.rows();
  const Index d2 = qv_.rows();
  const Index r = qu_.cols();
  x.resize((d1 + d2) * r);
  Eigen::Map<Matrix> du(x.data(), d1, r);
  Eigen::Map<Matrix> dv(x.data() + d1 * r, d2, r);
  du.noalias() = op_->a_rows().transpose() *
                 (bqv_.array().colwise() * y.array()).matrix();
  dv.noalias() = op_->b_rows().transpose() *
                 (aqu_.array().colwise() * y.array()).matrix();
}

Matrix GnimcLsMap::kernel_basis() const {
  const Index d1 = qu_.rows();
  const Index d2 = qv_.rows();
  const Index r = qu_.cols();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix k = Matrix::Zero((d1 + d2) * r, r * r);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < r; ++j) {
      const Index col = i * r + j;
      k.block(j * d1, col, d1, 1) = inv_sqrt2 * qu_.col(i);
      k.block(d1 * r + i * d2, col, d2, 1) = -inv_sqrt2 * qv_.col(j);
    }
  }
  return k;
}

std::pair<FactorPair, int> gnimc_step(const Problem& p, const FactorPair& iterate,
                                      const GnimcConfig& config) {
  config.validate();
  if (!p.observed()) throw BadDims("gnimc_step: problem has no observations");
  const SensingOp op(p.side, p.samples);
  const Vector fitted = op.fitted_values(iterate.u, iterate.v);
  const double ynorm = std::max(p.y.norm(), 1e-300);
  const double relres = (fitted - p.y).norm() / ynorm;
  const int cap = relres <= config.low_error_threshold ? config.inner_iters_low_error
                                                       : config.inner_iters_high_error;
  StepResult s = step_impl(op, p.y, iterate, config, cap);
  return {std::move(s.next), s.inner_iters};
}

FactorPair balance(const FactorPair& iterate) {
  const Index r = iterate.u.cols();
  const SvdResult svd = svd_truncated(iterate.u * iterate.v.transpose(), r);
  if (svd.s(0) <= 0.0) throw RankDeficient("balance: zero product");
  const Vector root = svd.s.cwiseSqrt();
  return {svd.u * root.asDiagonal(), svd.v * root.asDiagonal()};
}

std::pair<FactorPair, SolveReport> solve(const Problem& p, const FactorPair& init,
                                         const GnimcConfig& config, const Matrix* truth) {
  config.validate();
  if (!p.observed()) throw BadDims("solve: problem has no observations");

  const auto t0 = Clock::now();
  const SensingOp op(p.side, p.samples);
  const double ynorm = std::max(p.y.norm(), 1e-300);
  const double truth_norm = truth != nullptr ? truth->norm() : 0.0;

  FactorPair iterate = init;
  SolveReport report;
  Vector fitted = op.fitted_values(iterate.u, iterate.v);
  double prev_abs_err = -1.0;

  for (int t = 1; t <= config.max_outer_iters; ++t) {
    if (config.time_limit_sec > 0.0 && seconds_since(t0) > config.time_limit_sec) {
      report.termination = Termination::MaxIters;
      report.detail = "time limit reached";
      break;
    }
    const auto step_start = Clock::now();
    const double relres_in = (fitted - p.y).norm() / ynorm;
    const int cap = relres_in <= config.low_error_threshold
                        ? config.inner_iters_low_error
                        : config.inner_iters_high_error;
    StepResult step;
    try {
      if (config.balancing_enabled) iterate = balance(iterate);
      step = step_impl(op, p.y, iterate, config, cap);
    } catch (const Error& e) {
      report.termination = Termination::InnerFailure;
      report.detail = e.what();
      break;
    }
    iterate = std::move(step.next);
    report.outer_iters = t;
    report.total_inner_iters += step.inner_iters;

    const Vector fitted_new = op.fitted_values(iterate.u, iterate.v);
    const double fnorm = std::max(fitted_new.norm(), 1e-300);
    const double relres = (fitted_new - p.y).norm() / ynorm;
    const double change = (fitted_new - fitted).norm() / fnorm;
    fitted = fitted_new;

    IterationRecord rec;
    rec.outer = t;
    rec.observed_residual = relres;
    rec.estimate_change = change;
    rec.inner_iters = step.inner_iters;
    rec.step_time_sec = seconds_since(step_start);
    rec.elapsed_sec = seconds_since(t0);
    rec.u_sv_ratio = min_sv_ratio(iterate.u);
    rec.v_sv_ratio = min_sv_ratio(iterate.v);
    if (truth != nullptr) {
      const double abs_err = (iterate.u * iterate.v.transpose() - *truth).norm();
      rec.rel_rmse = abs_err / truth_norm;
      if (prev_abs_err > 0.0)
        report.empirical_gamma.push_back(abs_err / (prev_abs_err * prev_abs_err));
      prev_abs_err = abs_err;
      if (report.first_iter_below_target < 0 && rec.rel_rmse <= config.target_rel_rmse)
        report.first_iter_below_target = t;
    }
    report.final_rel_rmse = rec.rel_rmse;
    report.final_residual = relres;

    const bool record_now = (t % config.trace_stride == 0) || t == config.max_outer_iters;
    if (record_now) report.records.push_back(rec);

    if (relres <= config.stop_eps) {
      report.termination = Termination::ObservedResidualSmall;
      if (!record_now) report.records.push_back(rec);
      break;
    }
    if (change <= config.stop_eps) {
      report.termination = Termination::EstimateChangeSmall;
      if (!record_now) report.records.push_back(rec);
      break;
    }
    if (t == config.max_outer_iters) report.termination = Termination::MaxIters;
  }
  report.total_time_sec = seconds_since(t0);
  return {iterate, report};
}

ConditionEstimate estimate_condition(const LinearMap& op, const Matrix& kernel_basis,
                                     int power_iters, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Vector v = gaussian_vector(op.cols(), rng).normalized();
  Vector w(op.cols());
  double lambda = 0.0;
  for (int i = 0; i < power_iters; ++i) {
    op.apply_adjoint(op.apply(v), w);
    lambda = w.norm();
    if (lambda == 0.0) break;
    v = w / lambda;
  }
  ConditionEstimate est;
  est.sigma_max = std::sqrt(lambda);

  const Matrix dense = dense_from(op);
  Matrix normal = dense.transpose() * dense;
  if (kernel_basis.size() > 0)
    normal.noalias() += (lambda <= 0.0 ? 1.0 : lambda) * kernel_basis *
                        kernel_basis.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(normal);
  est.sigma_min_nonzero = std::sqrt(std::max(eig.eigenvalues()(0), 0.0));
  return est;
}

}  // namespace imc
