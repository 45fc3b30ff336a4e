#include "mg1li/numerics.hpp"

#include <Eigen/LU>
#include <cmath>
#include <sstream>

namespace mg1li {

namespace {

constexpr double kStochasticTol = 1e-9;
constexpr double kRcondFloor = 1e-14;

void require_square(const Matrix& p, const char* what) {
  if (p.rows() != p.cols() || p.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a nonempty square matrix, got " << p.rows()
        << "x" << p.cols();
    throw ValidationError(msg.str());
  }
}

}  // namespace

ProbabilityVector::ProbabilityVector(RowVector v) : v_(std::move(v)) {
  if (v_.size() == 0) throw ValidationError("probability vector: empty");
  for (Eigen::Index i = 0; i < v_.size(); ++i) {
    if (!(v_(i) >= -1e-12) || !std::isfinite(v_(i)))
      throw ValidationError("probability vector: negative or non-finite entry");
    if (v_(i) < 0) v_(i) = 0.0;
  }
  const double s = v_.sum();
  if (std::abs(s - 1.0) > 1e-12)
    throw ValidationError("probability vector: entries sum to " +
                          std::to_string(s));
}

ProbabilityVector stationary_vector(const Matrix& p) {
  require_square(p, "stationary_vector");
  const Eigen::Index n = p.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double e = p(i, j);
      if (!std::isfinite(e) || e < -1e-12)
        throw ValidationError("stationary_vector: invalid entry at row " +
                              std::to_string(i));
      row_sum += e;
    }
    if (std::abs(row_sum - 1.0) > kStochasticTol)
      throw ValidationError("stationary_vector: row " + std::to_string(i) +
                            " sums to " + std::to_string(row_sum));
  }
  if (n == 1) return ProbabilityVector(RowVector::Ones(1));

  // GTH elimination. States are removed from the highest index down;
  // the diagonal is never touched, so no subtraction ever happens.
  Matrix w = p.cwiseMax(0.0);
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    const double s = w.row(k).head(k).sum();
    if (!(s > 1e-300))
      throw NumericalError(
          "stationary_vector: state " + std::to_string(k) +
          " cannot reach the eliminated block (multiple closed classes "
          "or degenerate input)");
    w.col(k).head(k) /= s;
    w.topLeftCorner(k, k).noalias() += w.col(k).head(k) * w.row(k).head(k);
  }

  RowVector v(n);
  v(0) = 1.0;
  for (Eigen::Index k = 1; k < n; ++k)
    v(k) = v.head(k) * w.col(k).head(k);
  v /= v.sum();
  return ProbabilityVector(std::move(v));
}

Matrix fundamental_solve(const Matrix& m, const Matrix& rhs) {
  require_square(m, "fundamental_solve");
  if (rhs.rows() != m.rows())
    throw ValidationError("fundamental_solve: rhs has " +
                          std::to_string(rhs.rows()) + " rows, expected " +
                          std::to_string(m.rows()));
  const Matrix system = Matrix::Identity(m.rows(), m.cols()) - m;
  Eigen::PartialPivLU<Matrix> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond > kRcondFloor))
    throw NumericalError(
        "fundamental_solve: I - m is numerically singular (rcond = " +
        std::to_string(rcond) + "); spectral radius of m is not below one");
  Matrix x = lu.solve(rhs);
  const double rhs_scale = rhs.size() == 0 ? 0.0 : max_abs(rhs);
  const double resid = max_abs(system * x - rhs);
  if (rhs_scale > 0 && resid > 1e-10 * rhs_scale)
    throw NumericalError("fundamental_solve: residual " +
                         std::to_string(resid) + " exceeds 1e-10 * ||rhs||");
  return x;
}

Vector fundamental_solve(const Matrix& m, const Vector& rhs) {
  Matrix x = fundamental_solve(m, Matrix(rhs));
  return Vector(x.col(0));
}

}  // namespace mg1li
