#include "imc/problem.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "imc/linops.hpp"
#include "imc/rng.hpp"

namespace imc {
namespace {

Matrix orthonormal_gaussian(Index rows, Index cols, Rng& rng) {
  return qr_thin(gaussian_matrix(rows, cols, rng)).q;
}

Problem generate_impl(Index n1, Index n2, Index d1, Index d2, Vector spectrum,
                      double kappa, std::uint64_t seed) {
  const int r = static_cast<int>(spectrum.size());
  if (!(r >= 1 && r <= d1 && d1 <= n1 && r <= d2 && d2 <= n2))
    throw BadDims("generate: need r <= d1 <= n1 and r <= d2 <= n2");

  Rng rng = make_rng(seed);
  Problem p;
  p.side.a = orthonormal_gaussian(n1, d1, rng);
  p.side.b = orthonormal_gaussian(n2, d2, rng);
  p.side.mu = std::max(incoherence(p.side.a), incoherence(p.side.b));

  const Matrix u = orthonormal_gaussian(d1, r, rng);
  const Matrix v = orthonormal_gaussian(d2, r, rng);
  p.m_star = u * spectrum.asDiagonal() * v.transpose();
  p.spectrum = std::move(spectrum);
  p.kappa = kappa;
  p.r = r;
  p.seed = seed;
  return p;
}

}  // namespace

Problem generate(Index n1, Index n2, Index d1, Index d2, int r, double kappa,
                 std::uint64_t seed) {
  if (kappa < 1.0) throw BadDims("generate: kappa must be >= 1");
  if (r < 1) throw BadDims("generate: rank must be >= 1");
  if (r == 1 && kappa != 1.0)
    throw BadDims("generate: a rank-1 matrix has condition number 1, so kappa must be 1");
  // Linear interpolation between 1 and kappa, stored descending.
  Vector spectrum(r);
  if (r == 1) {
    spectrum(0) = 1.0;
  } else {
    for (int i = 0; i < r; ++i)
      spectrum(i) = kappa + (1.0 - kappa) * static_cast<double>(i) / (r - 1);
  }
  return generate_impl(n1, n2, d1, d2, std::move(spectrum), kappa, seed);
}

Problem generate_with_spectrum(Index n1, Index n2, Index d1, Index d2,
                               const Vector& spectrum, std::uint64_t seed) {
  if (spectrum.size() == 0) throw BadDims("generate_with_spectrum: empty spectrum");
  for (Index i = 0; i + 1 < spectrum.size(); ++i)
    if (spectrum(i) < spectrum(i + 1))
      throw BadDims("generate_with_spectrum: spectrum must be descending");
  if (spectrum(spectrum.size() - 1) <= 0.0)
    throw BadDims("generate_with_spectrum: spectrum entries must be positive");
  const double kappa = spectrum(0) / spectrum(spectrum.size() - 1);
  return generate_impl(n1, n2, d1, d2, spectrum, kappa, seed);
}

SampleSet sample_omega(Index n1, Index n2, std::size_t m, std::uint64_t seed) {
  const std::uint64_t total = static_cast<std::uint64_t>(n1) * static_cast<std::uint64_t>(n2);
  if (m < 1 || m > total) throw BadDims("sample_omega: sample count out of range");

  // Partial Fisher-Yates over the implicit flat index range, O(m) memory.
  Rng rng = make_rng(seed);
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  swapped.reserve(2 * m);
  SampleSet s;
  s.n1 = n1;
  s.n2 = n2;
  s.rows.reserve(m);
  s.cols.reserve(m);
  for (std::uint64_t k = 0; k < m; ++k) {
    std::uniform_int_distribution<std::uint64_t> pick(k, total - 1);
    const std::uint64_t j = pick(rng);
    auto it = swapped.find(j);
    const std::uint64_t value = it == swapped.end() ? j : it->second;
    auto kt = swapped.find(k);
    swapped[j] = kt == swapped.end() ? k : kt->second;
    s.rows.push_back(static_cast<std::int32_t>(value / n2));
    s.cols.push_back(static_cast<std::int32_t>(value % n2));
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.rows[a] != s.rows[b] ? s.rows[a] < s.rows[b] : s.cols[a] < s.cols[b];
  });
  SampleSet sorted;
  sorted.n1 = n1;
  sorted.n2 = n2;
  sorted.rows.reserve(m);
  sorted.cols.reserve(m);
  for (std::size_t idx : order) {
    sorted.rows.push_back(s.rows[idx]);
    sorted.cols.push_back(s.cols[idx]);
  }
  return sorted;
}

Vector exact_values(const Problem& p) {
  if (p.samples.empty()) throw BadDims("exact_values: problem has no sample set");
  const std::size_t m = p.samples.size();
  const Matrix mb = p.m_star * p.side.b.transpose();  // d1 x n2
  Vector out(static_cast<Index>(m));
  for (std::size_t k = 0; k < m; ++k)
    out(static_cast<Index>(k)) =
        p.side.a.row(p.samples.rows[k]).dot(mb.col(p.samples.cols[k]));
  return out;
}

Vector observe(const Problem& p, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw BadDims("observe: noise_sigma must be >= 0");
  Vector y = exact_values(p);
  if (noise_sigma > 0.0) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, noise_sigma);
    for (Index k = 0; k < y.size(); ++k) y(k) += normal(rng);
  }
  return y;
}

void add_feature_noise(Problem& p, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw BadDims("add_feature_noise: sigma must be >= 0");
  if (sigma == 0.0) return;
  Rng rng = make_rng(seed);
  p.side.a += sigma * gaussian_matrix(p.side.a.rows(), p.side.a.cols(), rng);
  p.side.b += sigma * gaussian_matrix(p.side.b.rows(), p.side.b.cols(), rng);
}

double rel_rmse(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw BadDims("rel_rmse: shape mismatch");
  const double denom = truth.norm();
  if (denom == 0.0) throw ZeroTruth("rel_rmse: zero reference matrix");
  return (truth - estimate).norm() / denom;
}

double incoherence(const Matrix& iso) {
  const Index n = iso.rows();
  const Index d = iso.cols();
  const double gram_err = (iso.transpose() * iso - Matrix::Identity(d, d))
                              .cwiseAbs()
                              .maxCoeff();
  if (gram_err > 1e-8) throw NotIsometry("incoherence: columns are not orthonormal");
  const double max_row = iso.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(n) * max_row / static_cast<double>(d);
}

std::string problem_to_json(const Problem& p) {
  nlohmann::json j;
  j["n1"] = p.n1();
  j["n2"] = p.n2();
  j["d1"] = p.d1();
  j["d2"] = p.d2();
  j["r"] = p.r;
  j["kappa"] = p.kappa;
  j["seed"] = p.seed;
  j["noise_sigma"] = p.noise_sigma;
  j["spectrum"] = std::vector<double>(p.spectrum.data(), p.spectrum.data() + p.spectrum.size());
  j["omega_rows"] = p.samples.rows;
  j["omega_cols"] = p.samples.cols;
  j["y"] = std::vector<double>(p.y.data(), p.y.data() + p.y.size());
  return j.dump(2);
}

Problem problem_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto spectrum_vec = j.at("spectrum").get<std::vector<double>>();
  Vector spectrum(static_cast<Index>(spectrum_vec.size()));
  for (std::size_t i = 0; i < spectrum_vec.size(); ++i)
    spectrum(static_cast<Index>(i)) = spectrum_vec[i];

  Problem p = generate_with_spectrum(j.at("n1").get<Index>(), j.at("n2").get<Index>(),
                                     j.at("d1").get<Index>(), j.at("d2").get<Index>(),
                                     spectrum, j.at("seed").get<std::uint64_t>());
  p.kappa = j.at("kappa").get<double>();
  p.noise_sigma = j.at("noise_sigma").get<double>();
  p.samples.rows = j.at("omega_rows").get<std::vector<std::int32_t>>();
  p.samples.cols = j.at("omega_cols").get<std::vector<std::int32_t>>();
  p.samples.n1 = p.n1();
  p.samples.n2 = p.n2();
  const auto y_vec = j.at("y").get<std::vector<double>>();
  p.y.resize(static_cast<Index>(y_vec.size()));
  for (std::size_t i = 0; i < y_vec.size(); ++i) p.y(static_cast<Index>(i)) = y_vec[i];
  if (p.y.size() != static_cast<Index>(p.samples.size()))
    throw BadDims("problem_from_json: y length does not match omega");
  return p;
}

void save_problem(const Problem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("save_problem: cannot open " + path);
  out << problem_to_json(p);
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_problem: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return problem_from_json(text);
}

}  // namespace imc
