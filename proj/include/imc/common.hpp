#ifndef IMC_COMMON_HPP
#define IMC_COMMON_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace imc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadDims : public Error {
 public:
  using Error::Error;
};

/// A matrix that was required to have full column rank does not.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// An iteration produced NaN or Inf.
class NonFinite : public Error {
 public:
  using Error::Error;
};

class ZeroTruth : public Error {
 public:
  using Error::Error;
};

class NotIsometry : public Error {
 public:
  using Error::Error;
};

class ZeroObservation : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace imc

#endif  // IMC_COMMON_HPP
