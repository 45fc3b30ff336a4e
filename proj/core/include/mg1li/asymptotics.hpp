#pragma once

#include <vector>

#include "mg1li/model.hpp"
#include "mg1li/ramaswami.hpp"
#include "mg1li/types.hpp"

namespace mg1li {

// Distribution of the nonnegative part of a one-step level increment,
// taken under the stationary law, plus its integrated tail.
struct SNLDistribution {
  std::vector<double> d;           // D(0..k_max), cumulative
  // 1 - D(k), accumulated from the block-tail closures rather than as
  // 1 - d[k]; keeps full relative accuracy deep into the tail.
  std::vector<double> tail_probs;
  std::vector<double> d_bar_i;     // 1 - D_I(0..k_max); empty until
                                   // integrated_tail has run
  double mean_d = 0.0;             // sum_l l * dD(l), over the covered range
  int k_max = 0;
  double coverage_gap = 0.0;       // 1 - D(k_max)
};

// Build D from the reference distribution; requires ref.tail_mass below
// 1e-10. A coverage gap above 1e-10 at k_max is recorded, not fatal.
SNLDistribution snl(const MG1Model& model, const LevelDistribution& ref,
                    int k_max);

// Fill d_bar_i with the equilibrium-distribution tail
//   1 - D_I(k),  D_I(k) = sum_{l=0}^{k} (1 - D(l)) / mean.
// Throws NumericalError when the increment mean is zero.
SNLDistribution integrated_tail(SNLDistribution snl_dist);

// Independent evaluation of 1 - D_I(k) from the block tail sums and
// moment vectors; returns the max absolute deviation from snl_dist's
// d_bar_i over 0..k_max. Used as a consistency gate (<= 1e-10).
double integrated_tail_crosscheck(const MG1Model& model,
                                  const LevelDistribution& ref,
                                  const SNLDistribution& snl_dist);

// Decay radii, tail coefficients and the convergence prefactors.
struct AsymptoticProfile {
  double r_a = 0.0;
  double r_b = 0.0;
  double r = 0.0;           // min(r_a, r_b), > 1
  double f_power = 0.0;     // f(N) = N^f_power
  bool f_heuristic = false; // mixed power exponents at equal radii
  bool fitted = false;      // numeric-fit path was used
  Vector c_a;               // length M1
  Vector c_b;               // length M0
  double c_star = 0.0;      // max entry over c_a, c_b
  double sigma = 0.0;
  RowVector varpi;
  Vector m_bar_a;
  Vector m_bar_a_plus;
  Vector m_bar_b;
  RowVector pi0;      // boundary row of the reference distribution
  RowVector pi_bar0;  // sum_{l>=1} pi_l of the reference distribution
  double theta = 0.0;     // r (pi0 c_b + pi_bar0 c_a) / (-sigma)
  double theta_di = 0.0;  // r (pi0 m_bar_b + pi_bar0 m_bar_a_plus) / (-sigma)

  double f(int n) const;
  // r^(-n) f(n), the reference decay rate of the level-wise error
  double rate(int n) const;
};

// Closed-form path for declared geometric_power tails; least-squares fit
// on the explicit blocks otherwise (>= 12 usable tail points required).
AsymptoticProfile decay_profile(const MG1Model& model,
                                const LevelDistribution& ref);

// Reference-free variant: radii, coefficients and moments only. The
// prefactors theta/theta_di need boundary mass and stay NaN; enough for
// the truncation-level selection rule.
AsymptoticProfile decay_profile(const MG1Model& model);

// Smallest N with (c*/-sigma) r^(-N+1) f(N) < epsilon, by forward scan.
int select_n(const AsymptoticProfile& profile, double epsilon);

struct SelectTrace {
  int n_star = 0;
  std::vector<double> bounds;  // bound value at N = 1..n_star
};

SelectTrace select_n_trace(const AsymptoticProfile& profile, double epsilon);

// Per-truncation-level comparison against the reference.
struct SweepRecord {
  int n = 0;
  std::vector<RowVector> diff_by_level;  // pi^(N)_k - pi_k, k = 0..k_report
  std::vector<double> l1_by_level;       // their l1 norms
  std::vector<double> rel_by_level;      // l1 norm / (pi_k e)
  double tv_total = 0.0;                 // summed l1 over the whole range
  double rate = 0.0;                     // r^(-N) f(N)
  double dbar_i_n = 0.0;                 // 1 - D_I(N)
};

struct SweepDiagnostics {
  std::vector<SweepRecord> records;  // ordered by n
  // Per level k: smallest tested N from which the difference stays
  // elementwise positive for every larger tested N; -1 if none.
  std::vector<int> positivity_threshold;
  double theta = 0.0;
  double theta_di = 0.0;
};

// Build one record (exposed separately so degenerate comparisons can be
// tested without running the pipeline).
SweepRecord build_sweep_record(int n, const LevelDistribution& approx,
                               const LevelDistribution& ref,
                               const AsymptoticProfile& profile,
                               const SNLDistribution& snl_dist, int k_report);

// Solve pi^(N) for each n and compare against the reference. Requires
// n <= n_ref/4 for every n. Independent n values may be distributed
// across `jobs` worker threads; records come back ordered by n.
SweepDiagnostics sweep_diagnostics(const MG1Model& model,
                                   const std::vector<int>& ns,
                                   const LevelDistribution& ref,
                                   const AsymptoticProfile& profile,
                                   const SNLDistribution& snl_dist,
                                   int k_report, int jobs = 1,
                                   const SolveOptions& opts = {});

}  // namespace mg1li
