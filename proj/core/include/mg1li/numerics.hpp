#pragma once

#include "mg1li/types.hpp"

namespace mg1li {

/// Row vector with nonnegative entries summing to one (within 1e-12).
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(RowVector v);

  const RowVector& row() const { return v_; }
  double operator[](Eigen::Index i) const { return v_(i); }
  Eigen::Index size() const { return v_.size(); }

 private:
  RowVector v_;
};

// Stationary vector of a row-stochastic matrix, computed by
// Grassmann-Taksar-Heyman elimination. GTH uses no subtractions, so the
// result is accurate even for nearly-uncoupled chains. Throws
// NumericalError when a state cannot reach the surviving block (more
// than one closed class) and ValidationError for non-stochastic input.
ProbabilityVector stationary_vector(const Matrix& p);

// Solve (I - m) x = rhs where m is substochastic with spectral radius
// below one. LU with partial pivoting; throws NumericalError when I - m
// is numerically singular (rcond < 1e-14) or the residual exceeds
// 1e-10 * ||rhs||.
Matrix fundamental_solve(const Matrix& m, const Matrix& rhs);
Vector fundamental_solve(const Matrix& m, const Vector& rhs);

}  // namespace mg1li
