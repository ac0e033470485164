#ifndef IMC_PROBLEM_HPP
#define IMC_PROBLEM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "imc/common.hpp"

namespace imc {

/// Side information: column/row feature subspaces as isometries A (n1 x d1)
/// and B (n2 x d2), plus their incoherence mu.
struct SideInfo {
  Matrix a;
  Matrix b;
  double mu = 1.0;

  Index n1() const { return a.rows(); }
  Index n2() const { return b.rows(); }
  Index d1() const { return a.cols(); }
  Index d2() const { return b.cols(); }
};

/// Observation set Omega as parallel index arrays, duplicate-free and
/// sorted by (i, j).
struct SampleSet {
  std::vector<std::int32_t> rows;
  std::vector<std::int32_t> cols;
  Index n1 = 0;
  Index n2 = 0;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  double sampling_rate() const {
    return n1 > 0 && n2 > 0 ? static_cast<double>(size()) / (static_cast<double>(n1) * n2) : 0.0;
  }
};

/// The iterate (U, V) representing M = U V^T, X = A U V^T B^T.
struct FactorPair {
  Matrix u;  // d1 x r
  Matrix v;  // d2 x r

  Matrix product() const { return u * v.transpose(); }
};

struct Problem {
  SideInfo side;
  Matrix m_star;     // d1 x d2, rank r ground truth in feature coordinates
  Vector spectrum;   // singular values of m_star, descending
  double kappa = 1.0;
  int r = 0;
  SampleSet samples;
  Vector y;          // observed values on Omega
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  Index n1() const { return side.n1(); }
  Index n2() const { return side.n2(); }
  Index d1() const { return side.d1(); }
  Index d2() const { return side.d2(); }
  bool observed() const { return !samples.empty() && y.size() == static_cast<Index>(samples.size()); }
};

/// Draws A, B, U, V entrywise standard normal, orthonormalizes their
/// columns, and sets M* = U D V^T with D linearly spaced from 1 to kappa
/// (stored descending, so sigma_1 = kappa, sigma_r = 1).
Problem generate(Index n1, Index n2, Index d1, Index d2, int r, double kappa,
                 std::uint64_t seed);

/// Variant with an explicitly prescribed spectrum (descending, positive
/// entries define the rank). Used by the rank-estimation experiments.
Problem generate_with_spectrum(Index n1, Index n2, Index d1, Index d2,
                               const Vector& spectrum, std::uint64_t seed);

/// m distinct cells drawn uniformly over all m-subsets of the grid.
SampleSet sample_omega(Index n1, Index n2, std::size_t m, std::uint64_t seed);

/// Exact values of X* = A M* B^T on Omega, without materializing X*.
Vector exact_values(const Problem& p);

/// y = X*_Omega + eps, eps iid N(0, noise_sigma^2). noise_sigma = 0 gives
/// exact entries.
Vector observe(const Problem& p, double noise_sigma, std::uint64_t seed);

/// Perturbs the side information matrices entrywise by N(0, sigma^2);
/// observations stay tied to the clean X*. Models inaccurate features.
void add_feature_noise(Problem& p, double sigma, std::uint64_t seed);

/// ||truth - estimate||_F / ||truth||_F.
double rel_rmse(const Matrix& estimate, const Matrix& truth);

/// max_i n * ||row_i||^2 / d for an isometry; >= 1, with n/d attained by
/// coordinate subspaces.
double incoherence(const Matrix& iso);

/// JSON round trip for replay: dims, seed, spectrum, Omega index arrays and
/// observed values. The generator matrices are re-derived from the seed.
std::string problem_to_json(const Problem& p);
Problem problem_from_json(const std::string& text);
void save_problem(const Problem& p, const std::string& path);
Problem load_problem(const std::string& path);

}  // namespace imc

#endif  // IMC_PROBLEM_HPP
