#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace olpdg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixSeq = std::vector<Matrix>;
using VectorSeq = std::vector<Vector>;

// Raised when a numerical precondition (invertibility, factorization) fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vector& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// max |X - X'|, or +inf for non-square input.
inline double asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(Matrix(a - a.transpose()));
}

inline Matrix symmetrize(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace olpdg
