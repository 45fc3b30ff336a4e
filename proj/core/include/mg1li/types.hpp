#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mg1li {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Bad inputs: malformed files, shape mismatches, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: divergent iterations, singular systems, failed
// postconditions. Usually indicates a violated stability assumption.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Elementwise max absolute value (used for fixed-point stopping tests).
inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Sum of absolute entries (the vector norm used throughout for
// distribution differences).
inline double l1_norm(const RowVector& v) { return v.cwiseAbs().sum(); }

}  // namespace mg1li
