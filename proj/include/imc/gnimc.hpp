#ifndef IMC_GNIMC_HPP
#define IMC_GNIMC_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imc/linops.hpp"
#include "imc/problem.hpp"
#include "imc/sensing.hpp"

namespace imc {

struct GnimcConfig {
  int max_outer_iters = 100;
  double stop_eps = 1e-14;
  int inner_iters_low_error = 10;
  int inner_iters_high_error = 1000;
  double low_error_threshold = 1e-4;
  double inner_tol = 1e-12;
  bool balancing_enabled = false;       // turn on for noisy runs
  bool min_norm_projection_enabled = true;
  double time_limit_sec = 0.0;          // 0 disables the limit
  double target_rel_rmse = 1e-4;        // benchmark bookkeeping only
  int trace_stride = 1;                 // record every k-th iteration

  void validate() const;
};

enum class Termination {
  ObservedResidualSmall,
  EstimateChangeSmall,
  MaxIters,
  InnerFailure,
};

const char* to_string(Termination t);

struct IterationRecord {
  int outer = 0;
  double rel_rmse = -1.0;          // -1 when no truth was supplied
  double observed_residual = 0.0;  // ||P_Omega(X_t) - Y|| / ||Y||
  double estimate_change = 0.0;    // ||P_Omega(X_t - X_{t-1})|| / ||P_Omega(X_t)||
  int inner_iters = 0;
  double step_time_sec = 0.0;
  double elapsed_sec = 0.0;
  double u_sv_ratio = 1.0;  // sigma_min/sigma_max of U_t
  double v_sv_ratio = 1.0;
};

struct SolveReport {
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIters;
  std::string detail;
  std::vector<double> empirical_gamma;  // ||X_{t+1}-X*|| / ||X_t-X*||^2
  int outer_iters = 0;
  int total_inner_iters = 0;
  double final_rel_rmse = -1.0;
  double final_residual = 0.0;
  int first_iter_below_target = -1;
  double total_time_sec = 0.0;
};

/// One Gauss-Newton update. Phase I solves the QR-preconditioned least
/// squares problem by LSQR from zero and maps the solution back through
/// the triangular factors; phase II removes the component along the
/// kernel directions (Q_U R, -Q_V R^T). Returns the updated iterate and
/// the number of inner iterations used.
std::pair<FactorPair, int> gnimc_step(const Problem& p, const FactorPair& iterate,
                                      const GnimcConfig& config);

/// Product-preserving rebalancing: SVD of U V^T, then (U sqrt(S), V sqrt(S)).
FactorPair balance(const FactorPair& iterate);

/// Full solver loop. `truth` (the d1 x d2 ground truth in feature
/// coordinates) enables the error trace; the iteration itself never reads it.
std::pair<FactorPair, SolveReport> solve(const Problem& p, const FactorPair& init,
                                         const GnimcConfig& config,
                                         const Matrix* truth = nullptr);

/// The inner least-squares operator L(dU, dV) = Vec_Omega(A (Q_U dV^T +
/// dU Q_V^T) B^T), exposed for diagnostics and tests. Domain layout:
/// [vec(dU); vec(dV)], column-major.
class GnimcLsMap final : public LinearMap {
 public:
  GnimcLsMap(const SensingOp& op, const Matrix& qu, const Matrix& qv);
  Index rows() const override;
  Index cols() const override;
  void apply(const Vector& x, Vector& y) const override;
  void apply_adjoint(const Vector& y, Vector& x) const override;

  /// Orthonormal basis of the known kernel as the columns of a
  /// (d1+d2)r x r^2 matrix, elements (u_i e_j^T; -v_j e_i^T)/sqrt(2).
  Matrix kernel_basis() const;

 private:
  const SensingOp* op_;
  Matrix qu_, qv_;
  Matrix aqu_, bqv_;  // gathered rows times the orthonormal factors
};

struct ConditionEstimate {
  double sigma_max = 0.0;
  double sigma_min_nonzero = 0.0;
  double condition() const { return sigma_max / sigma_min_nonzero; }
};

/// sigma_max by power iteration on the normal operator; smallest nonzero
/// singular value from a dense eigensolve after deflating the supplied
/// kernel basis. Small instances only.
ConditionEstimate estimate_condition(const LinearMap& op, const Matrix& kernel_basis,
                                     int power_iters = 100, std::uint64_t seed = 7);

}  // namespace imc

#endif  // IMC_GNIMC_HPP
