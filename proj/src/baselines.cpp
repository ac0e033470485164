#include "imc/baselines.hpp"

#include <chrono>
#include <cmath>

namespace imc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// One-sided least-squares operator for a half-step of alternating
/// minimization: dV -> Vec_Omega(A Q_U dV^T B^T) (or the mirrored map for
/// dU when `left` is false).
class AltMinHalfMap final : public LinearMap {
 public:
  AltMinHalfMap(const SensingOp& op, const Matrix& fixed_rows_times_q, bool left)
      : op_(&op), fq_(fixed_rows_times_q), left_(left) {}
  Index rows() const override { return static_cast<Index>(op_->num_samples()); }
  Index cols() const override {
    return (left_ ? op_->input_cols() : op_->input_rows()) * fq_.cols();
  }
  void apply(const Vector& x, Vector& y) const override {
    const Matrix& gather = left_ ? op_->b_rows() : op_->a_rows();
    const Eigen::Map<const Matrix> d(x.data(), gather.cols(), fq_.cols());
    y = (fq_.array() * (gather * d).array()).rowwise().sum();
  }
  void apply_adjoint(const Vector& y, Vector& x) const override {
    const Matrix& gather = left_ ? op_->b_rows() : op_->a_rows();
    x.resize(cols());
    Eigen::Map<Matrix> d(x.data(), gather.cols(), fq_.cols());
    d.noalias() = gather.transpose() * (fq_.array().colwise() * y.array()).matrix();
  }

 private:
  const SensingOp* op_;
  const Matrix& fq_;
  bool left_;
};

struct GdWorkspace {
  const SensingOp* op;
  const Vector* y;

  // E_Omega = P_Omega(A U V^T B^T) - Y on the samples; gradients
  // grad_U = 2 A^T E_Omega B V, grad_V = 2 B^T E_Omega^T A U.
  void gradients(const FactorPair& it, Matrix& gu, Matrix& gv, double* objective) const {
    const Matrix au = op->a_rows() * it.u;
    const Matrix bv = op->b_rows() * it.v;
    const Vector e = (au.array() * bv.array()).rowwise().sum().matrix() - *y;
    if (objective != nullptr) *objective = e.squaredNorm();
    gu.noalias() = 2.0 * op->a_rows().transpose() *
                   (bv.array().colwise() * e.array()).matrix();
    gv.noalias() = 2.0 * op->b_rows().transpose() *
                   (au.array().colwise() * e.array()).matrix();
  }
};

void add_imbalance_gradient(const FactorPair& it, double lambda, Matrix& gu, Matrix& gv) {
  const Matrix imbalance = it.u.transpose() * it.u - it.v.transpose() * it.v;
  gu.noalias() += lambda * it.u * imbalance;
  gv.noalias() -= lambda * it.v * imbalance;
}

std::pair<FactorPair, SolveReport> descent_solve(const Problem& p, const FactorPair& init,
                                                 const GnimcConfig& config,
                                                 double step_size, double lambda,
                                                 bool regularized, const Matrix* truth) {
  config.validate();
  if (step_size <= 0.0) throw BadDims("gd_solve: step size must be positive");
  if (!p.observed()) throw BadDims("gd_solve: problem has no observations");

  const auto t0 = Clock::now();
  const SensingOp op(p.side, p.samples);
  const GdWorkspace ws{&op, &p.y};
  const double ynorm = std::max(p.y.norm(), 1e-300);
  const double truth_norm = truth != nullptr ? truth->norm() : 0.0;

  FactorPair iterate = init;
  SolveReport report;
  Vector fitted = op.fitted_values(iterate.u, iterate.v);
  Matrix gu, gv;

  for (int t = 1; t <= config.max_outer_iters; ++t) {
    if (config.time_limit_sec > 0.0 && seconds_since(t0) > config.time_limit_sec) {
      report.termination = Termination::MaxIters;
      report.detail = "time limit reached";
      break;
    }
    const auto step_start = Clock::now();
    ws.gradients(iterate, gu, gv, nullptr);
    if (regularized) add_imbalance_gradient(iterate, lambda, gu, gv);
    FactorPair next{iterate.u - step_size * gu, iterate.v - step_size * gv};
    if (!next.u.allFinite() || !next.v.allFinite()) {
      report.termination = Termination::InnerFailure;
      report.detail = "non-finite iterate; step size too large";
      break;
    }
    iterate = std::move(next);
    report.outer_iters = t;

    const Vector fitted_new = op.fitted_values(iterate.u, iterate.v);
    const double fnorm = std::max(fitted_new.norm(), 1e-300);
    const double relres = (fitted_new - p.y).norm() / ynorm;
    const double change = (fitted_new - fitted).norm() / fnorm;
    fitted = fitted_new;

    IterationRecord rec;
    rec.outer = t;
    rec.observed_residual = relres;
    rec.estimate_change = change;
    rec.inner_iters = 1;
    rec.step_time_sec = seconds_since(step_start);
    rec.elapsed_sec = seconds_since(t0);
    if (truth != nullptr) {
      rec.rel_rmse = (iterate.u * iterate.v.transpose() - *truth).norm() / truth_norm;
      if (report.first_iter_below_target < 0 && rec.rel_rmse <= config.target_rel_rmse)
        report.first_iter_below_target = t;
    }
    report.final_rel_rmse = rec.rel_rmse;
    report.final_residual = relres;
    report.total_inner_iters = t;

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

}  // namespace

std::pair<FactorPair, SolveReport> altmin_solve(const Problem& p, const FactorPair& init,
                                                const GnimcConfig& config,
                                                const Matrix* truth) {
  config.validate();
  if (!p.observed()) throw BadDims("altmin_solve: problem has no observations");

  const auto t0 = Clock::now();
  const SensingOp op(p.side, p.samples);
  const double ynorm = std::max(p.y.norm(), 1e-300);
  const double truth_norm = truth != nullptr ? truth->norm() : 0.0;

  FactorPair iterate = init;
  SolveReport report;
  Vector fitted = op.fitted_values(iterate.u, iterate.v);

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
    int inner_used = 0;
    try {
      // V half-step. Reparameterize (U, V) -> (Q_U, V R_U^T), which keeps
      // the product, then solve for the V increment so a capped inner
      // solve can only improve on the incumbent.
      const QrResult qr_u = qr_thin(iterate.u);
      iterate.u = qr_u.q;
      iterate.v = iterate.v * qr_u.r.transpose();
      const Matrix aqu = op.a_rows() * iterate.u;
      const AltMinHalfMap vmap(op, aqu, /*left=*/true);
      Vector resid = p.y - op.fitted_values(iterate.u, iterate.v);
      LsqrResult vsol = lsqr_min_norm(vmap, resid, LsqrOptions{cap, config.inner_tol});
      iterate.v += Eigen::Map<const Matrix>(vsol.x.data(), iterate.v.rows(),
                                            iterate.v.cols());
      inner_used += vsol.iters;

      // U half-step, mirrored.
      const QrResult qr_v = qr_thin(iterate.v);
      iterate.v = qr_v.q;
      iterate.u = iterate.u * qr_v.r.transpose();
      const Matrix bqv = op.b_rows() * iterate.v;
      const AltMinHalfMap umap(op, bqv, /*left=*/false);
      resid = p.y - op.fitted_values(iterate.u, iterate.v);
      LsqrResult usol = lsqr_min_norm(umap, resid, LsqrOptions{cap, config.inner_tol});
      iterate.u += Eigen::Map<const Matrix>(usol.x.data(), iterate.u.rows(),
                                            iterate.u.cols());
      inner_used += usol.iters;
    } catch (const Error& e) {
      report.termination = Termination::InnerFailure;
      report.detail = e.what();
      break;
    }
    report.outer_iters = t;
    report.total_inner_iters += inner_used;

    const Vector fitted_new = op.fitted_values(iterate.u, iterate.v);
    const double fnorm = std::max(fitted_new.norm(), 1e-300);
    const double relres = (fitted_new - p.y).norm() / ynorm;
    const double change = (fitted_new - fitted).norm() / fnorm;
    fitted = fitted_new;

    IterationRecord rec;
    rec.outer = t;
    rec.observed_residual = relres;
    rec.estimate_change = change;
    rec.inner_iters = inner_used;
    rec.step_time_sec = seconds_since(step_start);
    rec.elapsed_sec = seconds_since(t0);
    if (truth != nullptr) {
      rec.rel_rmse = (iterate.u * iterate.v.transpose() - *truth).norm() / truth_norm;
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

FactorPair gd_step(const Problem& p, const FactorPair& iterate, double step_size) {
  if (step_size <= 0.0) throw BadDims("gd_step: step size must be positive");
  if (!p.observed()) throw BadDims("gd_step: problem has no observations");
  const SensingOp op(p.side, p.samples);
  const GdWorkspace ws{&op, &p.y};
  Matrix gu, gv;
  ws.gradients(iterate, gu, gv, nullptr);
  FactorPair next{iterate.u - step_size * gu, iterate.v - step_size * gv};
  if (!next.u.allFinite() || !next.v.allFinite())
    throw NonFinite("gd_step: overflow; step size too large");
  return next;
}

FactorPair rgd_step(const Problem& p, const FactorPair& iterate, double step_size,
                    double lambda) {
  if (step_size <= 0.0) throw BadDims("rgd_step: step size must be positive");
  if (lambda < 0.0) throw BadDims("rgd_step: lambda must be >= 0");
  if (!p.observed()) throw BadDims("rgd_step: problem has no observations");
  const SensingOp op(p.side, p.samples);
  const GdWorkspace ws{&op, &p.y};
  Matrix gu, gv;
  ws.gradients(iterate, gu, gv, nullptr);
  add_imbalance_gradient(iterate, lambda, gu, gv);
  FactorPair next{iterate.u - step_size * gu, iterate.v - step_size * gv};
  if (!next.u.allFinite() || !next.v.allFinite())
    throw NonFinite("rgd_step: overflow; step size too large");
  return next;
}

std::pair<FactorPair, SolveReport> gd_solve(const Problem& p, const FactorPair& init,
                                            const GnimcConfig& config, double step_size,
                                            const Matrix* truth) {
  return descent_solve(p, init, config, step_size, 0.0, false, truth);
}

std::pair<FactorPair, SolveReport> rgd_solve(const Problem& p, const FactorPair& init,
                                             const GnimcConfig& config, double step_size,
                                             double lambda, const Matrix* truth) {
  if (lambda < 0.0) throw BadDims("rgd_solve: lambda must be >= 0");
  return descent_solve(p, init, config, step_size, lambda, true, truth);
}

}  // namespace imc
