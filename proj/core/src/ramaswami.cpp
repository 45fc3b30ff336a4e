#include "mg1li/ramaswami.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mg1li/log.hpp"

namespace mg1li {

namespace {

double spectral_radius(const Matrix& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral radius: eigenvalue computation failed");
  double rho = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  return rho;
}

}  // namespace

RamaswamiKernels kernels(const TruncatedModel& tm, const GSolution& gsol) {
  const int n = tm.n;
  const Matrix& g = gsol.g;
  const Matrix inv_i_phi0 =
      fundamental_solve(gsol.phi0, Matrix(Matrix::Identity(tm.m1, tm.m1)));

  RamaswamiKernels kern;
  kern.r_seq.resize(static_cast<size_t>(n));
  kern.r0_seq.resize(static_cast<size_t>(n));

  // Suffix sums W(k) = sum_{m=0}^{N-k} A^(N)_{k+m} G^m share all powers
  // of G through the backward recurrence W(k) = A_k + W(k+1) G.
  Matrix wa = tm.a(n);
  Matrix wb = tm.b(n);
  kern.r_seq[static_cast<size_t>(n) - 1] = wa * inv_i_phi0;
  kern.r0_seq[static_cast<size_t>(n) - 1] = wb * inv_i_phi0;
  for (int k = n - 1; k >= 1; --k) {
    wa = tm.a(k) + wa * g;
    wb = tm.b(k) + wb * g;
    kern.r_seq[static_cast<size_t>(k) - 1] = wa * inv_i_phi0;
    kern.r0_seq[static_cast<size_t>(k) - 1] = wb * inv_i_phi0;
  }

  kern.r_sum = Matrix::Zero(tm.m1, tm.m1);
  for (const Matrix& r : kern.r_seq) kern.r_sum += r;
  kern.r0_sum = Matrix::Zero(tm.m0, tm.m1);
  for (const Matrix& r0 : kern.r0_seq) kern.r0_sum += r0;

  // Censored chain at the boundary: descend m-1 levels (powers of G),
  // then drop from level 1 into the boundary phases. The last step uses
  // the boundary return matrix G_0 = (I - Phi_0)^{-1} B_{-1}, which
  // reduces to G itself when the level-1 down block equals A_{-1}. wb
  // holds the suffix sum at k = 1, so wb * G_0 supplies the series.
  const Matrix g_boundary = inv_i_phi0 * tm.b_minus1;
  kern.k_matrix = tm.b(0) + wb * g_boundary;
  kern.kappa = stationary_vector(kern.k_matrix);

  kern.r_spectral_radius = spectral_radius(kern.r_sum);
  if (!(kern.r_spectral_radius < 1.0))
    throw NumericalError("kernels: spectral radius of R is " +
                         std::to_string(kern.r_spectral_radius) +
                         " (must be below one; chain unstable?)");
  return kern;
}

RowVector boundary_vector(const RamaswamiKernels& kern) {
  const RowVector& kappa = kern.kappa.row();
  const Vector ones = Vector::Ones(kern.r_sum.rows());
  const Vector upper = fundamental_solve(kern.r_sum, ones);
  const double denom = kappa.sum() + kappa.dot(kern.r0_sum * upper);
  return kappa / denom;
}

double LevelDistribution::total_mass() const {
  double m = pi0.sum();
  for (const RowVector& v : pis) m += v.sum();
  return m;
}

RowVector LevelDistribution::upper_sum() const {
  RowVector s;
  if (pis.empty()) return s;
  s = RowVector::Zero(pis[0].size());
  for (const RowVector& v : pis) s += v;
  return s;
}

LevelDistribution level_distribution(const TruncatedModel& tm,
                                     const GSolution& /*gsol*/,
                                     const RamaswamiKernels& kern,
                                     double mass_tol, int k_cap) {
  if (!(mass_tol > 0.0))
    throw ValidationError("level_distribution: mass_tol must be positive");
  if (k_cap < 0) k_cap = 10 * tm.n + 1000;

  LevelDistribution dist;
  dist.n_trunc = tm.n;
  dist.pi0 = boundary_vector(kern);

  const int n = tm.n;
  double mass = dist.pi0.sum();
  // The recursion only ever looks N levels back; older vectors are dead.
  std::vector<RowVector> ring(static_cast<size_t>(n));
  auto slot = [&](int k) -> RowVector& {
    return ring[static_cast<size_t>(k % n)];
  };
  for (int k = 1; k <= k_cap && mass < 1.0 - mass_tol; ++k) {
    RowVector pik = RowVector::Zero(tm.m1);
    if (k <= n) pik += dist.pi0 * kern.r0(k);
    const int lo = std::max(1, k - n);
    for (int l = lo; l <= k - 1; ++l) pik += slot(l) * kern.r(k - l);
    slot(k) = pik;
    dist.pis.push_back(std::move(pik));
    mass += dist.pis.back().sum();
  }
  dist.k_max = static_cast<int>(dist.pis.size());
  dist.tail_mass = 1.0 - mass;
  if (dist.tail_mass > mass_tol)
    log_message(LogLevel::info,
                "level_distribution: k_cap %d reached with tail mass %.3e "
                "(> mass_tol %.1e)",
                k_cap, dist.tail_mass, mass_tol);
  return dist;
}

LevelDistribution solve_level_distribution(const MG1Model& model, int n,
                                           const SolveOptions& opts) {
  const TruncatedModel tm = truncate(model, n);
  const GSolution gsol = solve_g(tm, opts.tol_g, opts.max_iter);
  const RamaswamiKernels kern = kernels(tm, gsol);
  return level_distribution(tm, gsol, kern, opts.mass_tol, opts.k_cap);
}

LevelDistribution reference_solution(const MG1Model& model, int n_ref,
                                     double mass_tol,
                                     const SolveOptions& opts) {
  if (n_ref < 1) throw ValidationError("reference_solution: n_ref must be >= 1");
  SolveOptions o = opts;
  o.mass_tol = mass_tol;
  LevelDistribution dist = solve_level_distribution(model, n_ref, o);
  dist.is_reference = true;
  const TailDecay td = tail_decay(model);
  if (td.available && std::isfinite(td.r)) {
    const DriftReport d = drift(model);
    if (d.stable)
      dist.est_residual_bound =
          td.c_star / (-d.sigma) *
          std::pow(td.r, -static_cast<double>(n_ref - 1)) *
          std::pow(static_cast<double>(n_ref), td.f_power);
  }
  return dist;
}

double l1_distance(const LevelDistribution& a, const LevelDistribution& b,
                   int k_lo, int k_hi) {
  if (k_lo < 0 || k_hi < k_lo)
    throw ValidationError("l1_distance: bad level range");
  double total = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (k == 0) {
      total += l1_norm(a.pi0 - b.pi0);
      continue;
    }
    const bool in_a = k <= a.k_max;
    const bool in_b = k <= b.k_max;
    if (in_a && in_b)
      total += l1_norm(a.level(k) - b.level(k));
    else if (in_a)
      total += l1_norm(a.level(k));
    else if (in_b)
      total += l1_norm(b.level(k));
  }
  return total;
}

}  // namespace mg1li
