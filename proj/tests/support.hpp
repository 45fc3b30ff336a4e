#pragma once

#include <random>
#include <string>
#include <vector>

#include "mg1li/model.hpp"
#include "mg1li/numerics.hpp"
#include "mg1li/ramaswami.hpp"

namespace mg1li_test {

using namespace mg1li;

inline std::string model_path(const std::string& name) {
  return std::string(MG1LI_TEST_MODEL_DIR) + "/" + name;
}

// Power-iteration stationary vector, independent of the GTH path used
// by the library.
inline RowVector power_iteration_stationary(const Matrix& p, int iters = 200000,
                                            double tol = 1e-14) {
  RowVector v = RowVector::Constant(p.rows(), 1.0 / double(p.rows()));
  for (int i = 0; i < iters; ++i) {
    RowVector next = v * p;
    next /= next.sum();
    if ((next - v).cwiseAbs().maxCoeff() < tol) return next;
    v = next;
  }
  return v;
}

// Random nonnegative row vector with a prescribed sum; all entries kept
// strictly positive so the generated chains stay irreducible.
inline RowVector random_simplex_row(std::mt19937_64& rng, int n, double total) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RowVector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  v *= total / v.sum();
  return v;
}

// Random stable model with geometric_power tails: gamma in [0.2, 0.8],
// dimensions up to 5, and per-phase mean drift forced below -0.05 so
// that sigma < 0 holds for any phase distribution.
inline MG1Model random_stable_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_real_distribution<double> gam(0.2, 0.8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MG1Model m;
  m.m0 = dim(rng);
  m.m1 = dim(rng);
  m.tail.kind = TailKind::geometric_power;
  m.tail.gamma_a = gam(rng);
  m.tail.gamma_b = gam(rng);
  m.tail.alpha = unit(rng) < 0.7 ? 1.0 : 2.0;
  m.tail.beta = unit(rng) < 0.7 ? 1.0 : 2.0;
  m.tail.k_explicit = 0;

  const double mass_a =
      tail_mass_series(m.tail.gamma_a, m.tail.alpha, 1);
  const double mean_a =
      tail_weighted_series(m.tail.gamma_a, m.tail.alpha, 1, 0.0) / mass_a;
  const double mass_b =
      tail_mass_series(m.tail.gamma_b, m.tail.beta, 1);

  Matrix a_minus1(m.m1, m.m1), a0(m.m1, m.m1), c_a(m.m1, m.m1);
  for (int i = 0; i < m.m1; ++i) {
    const double down = 0.55 + 0.2 * unit(rng);
    // mean up-step is up * mean_a; keep down - up*mean_a >= 0.05
    const double up_cap = (down - 0.1) / mean_a;
    const double up = std::min(0.02 + 0.06 * unit(rng), up_cap);
    a_minus1.row(i) = random_simplex_row(rng, m.m1, down);
    a0.row(i) = random_simplex_row(rng, m.m1, 1.0 - down - up);
    c_a.row(i) = random_simplex_row(rng, m.m1, up / mass_a);
  }
  m.a_blocks = {a_minus1, a0};
  m.tail.c_mat_a = c_a;

  Matrix b_minus1(m.m1, m.m0);
  for (int i = 0; i < m.m1; ++i)
    b_minus1.row(i) = random_simplex_row(rng, m.m0, a_minus1.row(i).sum());
  m.b_minus1 = b_minus1;

  Matrix b0(m.m0, m.m0), c_b(m.m0, m.m1);
  for (int i = 0; i < m.m0; ++i) {
    const double up = 0.02 + 0.1 * unit(rng);
    b0.row(i) = random_simplex_row(rng, m.m0, 1.0 - up);
    c_b.row(i) = random_simplex_row(rng, m.m1, up / mass_b);
  }
  m.b_blocks = {b0};
  m.tail.c_mat_b = c_b;

  validate(m);
  return m;
}

// Residual of the stationarity balance at one level of the truncated
// chain: incoming flow minus the level's own mass. Valid for
// 0 <= k <= dist.k_max - 1.
inline double balance_residual(const TruncatedModel& tm,
                               const LevelDistribution& dist, int k) {
  const int n = tm.n;
  if (k == 0) {
    RowVector in = dist.pi0 * tm.b(0);
    if (dist.k_max >= 1) in += dist.level(1) * tm.b_minus1;
    return (in - dist.pi0).cwiseAbs().maxCoeff();
  }
  RowVector in = RowVector::Zero(tm.m1);
  if (k <= n) in += dist.pi0 * tm.b(k);
  for (int l = std::max(1, k - n); l <= std::min(k + 1, dist.k_max); ++l) {
    const int jump = k - l;
    if (jump >= -1 && jump <= n) in += dist.level(l) * tm.a(jump);
  }
  return (in - dist.level(k)).cwiseAbs().maxCoeff();
}

}  // namespace mg1li_test
