#pragma once

#include "mg1li/model.hpp"
#include "mg1li/numerics.hpp"
#include "mg1li/types.hpp"

namespace mg1li {

// Solution of the truncated G-matrix equation
//   G = sum_{m=-1}^{N} A^(N)_m G^(m+1)
// together with the derived quantities the recursion needs.
struct GSolution {
  Matrix g;                  // M1 x M1, minimal nonnegative solution
  ProbabilityVector g_vec;   // stationary vector of g (when stochastic)
  Matrix phi0;               // sum_{m=0}^{N} A^(N)_m G^m
  long iterations = 0;
  double residual = 0.0;     // fixed-point defect, elementwise max norm
  bool monotone = true;      // iterates stayed elementwise nondecreasing
  bool stochastic = false;   // row sums reached one within 100*tol
};

// Fixed-point iteration from the zero matrix; the iterates increase
// monotonically to the minimal nonnegative solution. Each sweep
// evaluates the block polynomial by a right-to-left Horner pass, so one
// sweep costs N+2 matrix products and no powers of G are stored.
GSolution solve_g(const TruncatedModel& tm, double tol = 1e-12,
                  long max_iter = 1000000);

// Phi_0^(N) for a given G; substochastic with I - Phi_0 invertible under
// the stability assumptions (verified via fundamental_solve).
Matrix phi0(const TruncatedModel& tm, const Matrix& g);

// Stationary vector of the solved G (delegates to stationary_vector).
ProbabilityVector g_stationary(const GSolution& gsol);

// Second-largest eigenvalue modulus of g; 0 for 1x1 input. The value is
// a diagnostic for aperiodicity: slem < 1 means the powers of G converge
// geometrically with empirical margin 1/slem - 1.
double spectral_gap(const Matrix& g);
inline double spectral_gap(const GSolution& gsol) { return spectral_gap(gsol.g); }

}  // namespace mg1li
