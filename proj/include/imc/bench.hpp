#ifndef IMC_BENCH_HPP
#define IMC_BENCH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imc/baselines.hpp"
#include "imc/gnimc.hpp"
#include "imc/problem.hpp"
#include "imc/rankest.hpp"
#include "imc/sensing.hpp"

namespace imc::bench {

enum class ExperimentKind { Sweep, Rank, Rip, Landscape };

struct Dims {
  Index n1 = 0, n2 = 0, d1 = 0, d2 = 0;
  int r = 0;
  std::size_t dof() const {
    return static_cast<std::size_t>((d1 + d2 - r)) * static_cast<std::size_t>(r);
  }
};

struct SolverSpec {
  std::string id;               // gnimc | altmin | gd | rgd
  GnimcConfig config;
  std::string balancing = "auto";  // "auto" | "on" | "off"
  double eta = 0.0;             // 0 = tune over the grid
  std::vector<double> eta_grid; // empty = default grid scaled by 1/kappa
  double lambda = 1.0;
  std::string init = "spectral";  // "spectral" | "random"
};

struct CheckSpec {
  // Optional pass/fail thresholds; a miss flips the CLI exit code to 3.
  std::optional<double> median_final_rel_rmse;  // sweep: over the last group
  std::optional<double> rank_hit_fraction;      // rank: fraction with r_hat == expected
  std::optional<int> expected_rank;
  std::optional<double> rip_delta;              // rip: quantile threshold
  std::optional<double> rip_fraction;
  std::optional<double> landscape_rel_rmse;     // landscape: every run below
};

struct ExperimentConfig {
  std::string name = "custom";
  ExperimentKind kind = ExperimentKind::Sweep;
  Dims dims;
  std::vector<double> kappas{10.0};
  std::vector<double> rhos;                 // oversampling ratios
  std::vector<std::size_t> num_samples;     // alternative to rhos
  double sample_fraction = 0.0;             // alternative: |Omega| = frac * n1 * n2
  std::vector<double> noise_sigmas{0.0};
  std::string noise_target = "entries";     // entries | features | both
  std::vector<SolverSpec> solvers;
  int num_seeds = 1;
  std::uint64_t base_seed = 1;
  bool trace = true;

  // rank experiments
  std::vector<double> spectrum;
  std::vector<std::optional<double>> d_consts;  // nullopt = default D

  // rip experiments
  int rip_rank = 0;                         // 0 = min(d1, d2)
  int rip_trials = 100;
  double rip_delta = 0.5;                   // delta in the sample-size rule
  std::vector<double> rip_omega_scales{1.0};
  std::vector<double> rip_test_kappas{0.0};

  // landscape experiments
  double landscape_sample_const = 10.0;     // |Omega| = const * mu^2 d1 d2 log n
  int pilot_iters = 2500;
  int pilot_seeds = 3;

  CheckSpec check;

  void validate() const;
};

struct RunRecord {
  std::string solver;
  int seed = 0;
  double kappa = 0.0;
  double rho = 0.0;
  std::size_t m = 0;
  double noise_sigma = 0.0;
  std::string noise_target;
  double eta = 0.0;
  double lambda = 0.0;
  std::uint64_t config_hash = 0;
  double final_rel_rmse = -1.0;
  double final_residual = 0.0;
  int outer_iters = 0;
  int total_inner_iters = 0;
  int iters_to_target = -1;
  std::string termination;
  double wall_time_sec = 0.0;
  std::string trace_file;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::map<std::string, double> summary;  // named scalar results (slopes etc.)
  bool any_run_failed = false;
  bool checks_passed = true;
};

/// Parses and validates a JSON experiment config; throws Error with an
/// actionable message on schema violations.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

const std::vector<std::string>& preset_names();
ExperimentConfig preset(const std::string& name);

/// Runs the (kappa x rho x sigma x seed x solver) grid on a worker pool and
/// writes runs.csv, summary.csv and per-run trace files under out_dir.
/// All solvers share the problem instance and the spectral initialization
/// of each run.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                int workers);

/// Noise sweep: run_experiment plus a log-log slope fit of median final
/// error against sigma (over the positive sigmas).
ExperimentResult noise_sweep(const ExperimentConfig& config, const std::string& out_dir,
                             int workers);

/// Rank estimation experiment; writes rank_runs.csv and rank_gaps.csv.
ExperimentResult rank_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 int workers);

/// Empirical restricted-isometry probe over an |Omega| grid and a probe
/// condition-number grid; writes rip.csv and rip_summary.csv.
ExperimentResult rip_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                int workers);

/// Gradient descent from random initializations; writes landscape.csv.
ExperimentResult landscape_experiment(const ExperimentConfig& config,
                                      const std::string& out_dir, int workers);

/// Dispatches on config.kind.
ExperimentResult run(const ExperimentConfig& config, const std::string& out_dir, int workers);

/// Step-size pilot: short runs over the grid on a few seeds, best median
/// final error wins (ties to the larger step).
double tune_step_size(const ExperimentConfig& config, const SolverSpec& solver, double kappa,
                      std::size_t m, double sigma, int workers);

std::uint64_t hash_config(const ExperimentConfig& config);
std::string format_double(double v);

}  // namespace imc::bench

#endif  // IMC_BENCH_HPP
