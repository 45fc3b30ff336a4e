#include "mg1li/gmatrix.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mg1li/log.hpp"

namespace mg1li {

namespace {

// One fixed-point sweep: sum_{m=-1}^{N} A^(N)_m G^(m+1), evaluated as
// A_{-1} + (A_0 + (A_1 + ... ) G) G by a right-to-left Horner pass.
Matrix sweep(const TruncatedModel& tm, const Matrix& g) {
  const int n = tm.n;
  Matrix acc = tm.a(n);
  for (int m = n - 1; m >= 0; --m) acc = tm.a(m) + acc * g;
  return tm.a(-1) + acc * g;
}

}  // namespace

GSolution solve_g(const TruncatedModel& tm, double tol, long max_iter) {
  if (!(tol > 0.0)) throw ValidationError("solve_g: tol must be positive");
  GSolution sol;
  Matrix g = Matrix::Zero(tm.m1, tm.m1);
  double step = 0.0;
  long it = 0;
  for (;;) {
    const Matrix next = sweep(tm, g);
    step = max_abs(next - g);
    if ((next - g).minCoeff() < -1e-15) sol.monotone = false;
    g = next;
    ++it;
    if (step <= tol) break;
    if (it >= max_iter)
      throw NumericalError(
          "solve_g: no convergence after " + std::to_string(it) +
          " iterations (step " + std::to_string(step) +
          "); drift may be near zero or tol too tight");
    if (it % 100000 == 0)
      log_message(LogLevel::debug, "solve_g: iteration %ld, step %.3e", it, step);
  }
  sol.g = g;
  sol.iterations = it;
  sol.residual = max_abs(sweep(tm, g) - g);
  sol.stochastic =
      (g * Vector::Ones(tm.m1) - Vector::Ones(tm.m1)).cwiseAbs().maxCoeff() <=
      100.0 * tol;
  if (sol.stochastic) {
    try {
      sol.g_vec = stationary_vector(g);
    } catch (const NumericalError&) {
      // G with several closed classes (violated aperiodicity setting);
      // g_stationary() surfaces the error when the vector is requested.
      log_message(LogLevel::debug, "solve_g: G is reducible, g left empty");
    }
  }
  sol.phi0 = phi0(tm, g);
  log_message(LogLevel::debug, "solve_g: N=%d converged in %ld iterations, defect %.3e",
              tm.n, it, sol.residual);
  return sol;
}

Matrix phi0(const TruncatedModel& tm, const Matrix& g) {
  const int n = tm.n;
  // sum_{m=0}^{N} A^(N)_m G^m = A_0 + (A_1 + (A_2 + ...) G) G
  Matrix acc = tm.a(n);
  for (int m = n - 1; m >= 1; --m) acc = tm.a(m) + acc * g;
  Matrix p0 = tm.a(0) + acc * g;
  // I - Phi_0 must be invertible for the recursion to make sense.
  fundamental_solve(p0, Matrix(Matrix::Identity(tm.m1, tm.m1)));
  return p0;
}

ProbabilityVector g_stationary(const GSolution& gsol) {
  return stationary_vector(gsol.g);
}

double spectral_gap(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0)
    throw ValidationError("spectral_gap: expected a square matrix");
  if (g.rows() == 1) return 0.0;
  Eigen::EigenSolver<Matrix> es(g, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral_gap: eigenvalue computation failed");
  std::vector<double> mods;
  mods.reserve(static_cast<size_t>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    mods.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mods.begin(), mods.end(), std::greater<double>());
  return mods[1];
}

}  // namespace mg1li
