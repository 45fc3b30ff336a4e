#pragma once

#include <optional>
#include <vector>

#include "mg1li/gmatrix.hpp"
#include "mg1li/model.hpp"
#include "mg1li/numerics.hpp"
#include "mg1li/types.hpp"

namespace mg1li {

// The matrices of the level recursion at truncation level N:
//   R(k)  = sum_{m=0}^{N-k} A^(N)_{k+m} G^m [I - Phi_0]^{-1}
//   R0(k) = sum_{m=0}^{N-k} B^(N)_{k+m} G^m [I - Phi_0]^{-1}
//   K     = B^(N)_0 + sum_{m=1}^{N} B^(N)_m G^(m-1) G_0
// where G_0 = (I - Phi_0)^{-1} B_{-1} is the return matrix from level 1
// into the boundary phases (equal to G when B_{-1} = A_{-1}).
struct RamaswamiKernels {
  std::vector<Matrix> r_seq;   // r_seq[k-1]  = R(k),  k = 1..N
  std::vector<Matrix> r0_seq;  // r0_seq[k-1] = R0(k), k = 1..N
  Matrix r_sum;                // sum of R(k)
  Matrix r0_sum;               // sum of R0(k)
  Matrix k_matrix;             // M0 x M0, stochastic
  ProbabilityVector kappa;     // stationary vector of k_matrix
  double r_spectral_radius = 0.0;

  const Matrix& r(int k) const { return r_seq[static_cast<size_t>(k) - 1]; }
  const Matrix& r0(int k) const { return r0_seq[static_cast<size_t>(k) - 1]; }
};

RamaswamiKernels kernels(const TruncatedModel& tm, const GSolution& gsol);

// Boundary vector pi_0. kappa is rescaled so that the whole level
// distribution sums to one: the recursion gives
//   sum_{k>=1} pi_k = pi_0 R0 (I - R)^{-1},
// hence pi_0 = kappa / (kappa e + kappa R0 (I - R)^{-1} e).
RowVector boundary_vector(const RamaswamiKernels& kern);

// Level-partitioned distribution. tail_mass is one minus the accumulated
// mass over levels 0..k_max; entries are exact partial results, never
// renormalized.
struct LevelDistribution {
  RowVector pi0;                // length M0
  std::vector<RowVector> pis;   // levels 1..k_max, each length M1
  int k_max = 0;
  double tail_mass = 0.0;
  int n_trunc = 0;
  bool is_reference = false;
  // Estimated residual of a reference run, when tail data allows it.
  std::optional<double> est_residual_bound;

  const RowVector& level(int k) const { return pis[static_cast<size_t>(k) - 1]; }
  double total_mass() const;
  // sum_{l>=1} pi_l as a single row vector
  RowVector upper_sum() const;
};

// Run the level recursion until the accumulated mass reaches
// 1 - mass_tol or k_cap levels have been produced (the shortfall is
// reported in tail_mass, not fatal). Only the last N level vectors are
// kept live; memory is O(N * M1).
LevelDistribution level_distribution(const TruncatedModel& tm,
                                     const GSolution& gsol,
                                     const RamaswamiKernels& kern,
                                     double mass_tol = 1e-12, int k_cap = -1);

struct SolveOptions {
  double tol_g = 1e-12;
  long max_iter = 1000000;
  double mass_tol = 1e-12;
  int k_cap = -1;  // default: 10 N + 1000
};

// Whole pipeline at one truncation level: truncate, solve G, build the
// kernels, run the recursion.
LevelDistribution solve_level_distribution(const MG1Model& model, int n,
                                           const SolveOptions& opts = {});

// Pipeline at a large n_ref; the result stands in for the untruncated
// distribution and is labeled as reference. When the tail descriptor
// allows, the level-wise residual bound (c*/-sigma) r^(-n_ref+1) f(n_ref)
// is recorded.
LevelDistribution reference_solution(const MG1Model& model, int n_ref,
                                     double mass_tol = 1e-12,
                                     const SolveOptions& opts = {});

// Sum over levels lo..hi of the l1 distance between the level vectors
// (levels beyond a distribution's range count as zero).
double l1_distance(const LevelDistribution& a, const LevelDistribution& b,
                   int k_lo, int k_hi);

}  // namespace mg1li
