#include "mg1li/oracle.hpp"

#include <Eigen/LU>
#include <cmath>

#include "mg1li/log.hpp"
#include "mg1li/numerics.hpp"

namespace mg1li {

namespace {

constexpr long kStateCap = 200000;

// Dense transition matrix of the truncated chain restricted to levels
// 0..cap. With lumping, any jump above the cap is redirected to the top
// level, which keeps the matrix exactly stochastic; without it the
// excess mass is dropped.
Matrix assemble(const TruncatedModel& tm, int cap, bool lump) {
  const int m0 = tm.m0, m1 = tm.m1, n = tm.n;
  const Eigen::Index dim = m0 + static_cast<Eigen::Index>(cap) * m1;
  Matrix p = Matrix::Zero(dim, dim);
  auto offset = [&](int level) -> Eigen::Index {
    return level == 0 ? 0 : m0 + static_cast<Eigen::Index>(level - 1) * m1;
  };

  // Boundary row: B_0, B_1, ..., with overflow lumped into level cap.
  p.block(0, 0, m0, m0) = tm.b(0);
  for (int j = 1; j <= std::min(n, cap - 1); ++j)
    p.block(0, offset(j), m0, m1) = tm.b(j);
  if (lump && n >= cap) {
    Matrix rest = Matrix::Zero(m0, m1);
    for (int j = cap; j <= n; ++j) rest += tm.b(j);
    p.block(0, offset(cap), m0, m1) += rest;
  } else if (n >= cap) {
    p.block(0, offset(cap), m0, m1) += tm.b(cap);
  }

  for (int i = 1; i <= cap; ++i) {
    const Eigen::Index row = offset(i);
    if (i == 1)
      p.block(row, 0, m1, m0) = tm.b_minus1;
    else
      p.block(row, offset(i - 1), m1, m1) = tm.a(-1);
    const int top_direct = std::min(i + n, cap - 1);
    for (int j = i; j <= top_direct; ++j)
      p.block(row, offset(j), m1, m1) += tm.a(j - i);
    if (i + n >= cap) {
      if (lump) {
        Matrix rest = Matrix::Zero(m1, m1);
        for (int m = cap - i; m <= n; ++m)
          if (m >= -1) rest += tm.a(m);
        p.block(row, offset(cap), m1, m1) += rest;
      } else if (cap - i <= n && cap - i >= -1) {
        p.block(row, offset(cap), m1, m1) += tm.a(cap - i);
      }
    }
  }
  return p;
}

// Balance equations with one equation replaced by normalization; the
// replaced equation absorbs the substochastic defect of the dropped
// tail, and the result is rescaled to total mass one by construction.
RowVector solve_renormalized(const Matrix& p) {
  const Eigen::Index dim = p.rows();
  Matrix system = p.transpose() - Matrix::Identity(dim, dim);
  system.row(0) = RowVector::Ones(dim);
  Vector rhs = Vector::Zero(dim);
  rhs(0) = 1.0;
  Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > 1e-14))
    throw NumericalError(
        "oracle: renormalized balance system is numerically singular");
  Vector v = lu.solve(rhs);
  const double total = v.sum();
  if (!(std::abs(total) > 0.0))
    throw NumericalError("oracle: renormalized solve produced zero mass");
  return RowVector(v.transpose() / total);
}

}  // namespace

OracleSolution brute_force_stationary(const TruncatedModel& tm, int levels,
                                      OracleMethod method) {
  if (levels < 1) throw ValidationError("oracle: levels must be >= 1");
  if (static_cast<long>(levels) * tm.m1 > kStateCap)
    throw ValidationError("oracle: state cap exceeded (levels * M1 = " +
                          std::to_string(static_cast<long>(levels) * tm.m1) +
                          " > " + std::to_string(kStateCap) + ")");
  const bool lump = method == OracleMethod::lump_last;
  const Matrix p = assemble(tm, levels, lump);
  log_message(LogLevel::info, "oracle: assembled %ld states (levels 0..%d)",
              static_cast<long>(p.rows()), levels);

  RowVector v;
  if (lump)
    v = stationary_vector(p).row();
  else
    v = solve_renormalized(p);

  OracleSolution sol;
  sol.levels = levels;
  sol.method = method;
  sol.pi_hat.n_trunc = tm.n;
  sol.pi_hat.pi0 = v.head(tm.m0);
  sol.pi_hat.pis.reserve(static_cast<size_t>(levels));
  for (int k = 1; k <= levels; ++k)
    sol.pi_hat.pis.push_back(
        v.segment(tm.m0 + static_cast<Eigen::Index>(k - 1) * tm.m1, tm.m1));
  sol.pi_hat.k_max = levels;
  sol.pi_hat.tail_mass = 1.0 - sol.pi_hat.total_mass();
  return sol;
}

int default_oracle_levels(const LevelDistribution& pi) {
  double tail = pi.tail_mass;
  int k = pi.k_max;
  // Walk back from the top until the remaining tail exceeds 1e-10, then
  // round up to a multiple of 50.
  while (k > 1 && tail + pi.level(k).sum() < 1e-10) {
    tail += pi.level(k).sum();
    --k;
  }
  return ((k + 49) / 50) * 50;
}

}  // namespace mg1li
