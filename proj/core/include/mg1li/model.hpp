#pragma once

#include <string>
#include <vector>

#include "mg1li/types.hpp"

namespace mg1li {

// Analytic description of the block sequences beyond the explicit lists.
//
//   finite          blocks are zero beyond the explicit lists
//   geometric_power A_k = C_A k^(alpha-1) gamma_a^k and
//                   B_k = C_B k^(beta-1)  gamma_b^k for k > k_explicit
//   undeclared      no tail information (treated as finite for sums;
//                   asymptotic checks report "unknown")
enum class TailKind { finite, geometric_power, undeclared };

struct TailSpec {
  TailKind kind = TailKind::finite;
  double gamma_a = 0.0;
  double gamma_b = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  Matrix c_mat_a;  // M1 x M1
  Matrix c_mat_b;  // M0 x M1
  int k_explicit = 0;
};

// An M/G/1-type chain: boundary blocks B, repeating blocks A, and a tail
// descriptor. Immutable after construction; validate() is called by
// load_model and by the factory used in tests.
struct MG1Model {
  int m0 = 0;  // boundary phase count
  int m1 = 0;  // repeating phase count

  // a_blocks[i] holds A_{i-1}; the list covers A_{-1} .. A_{ka()}.
  std::vector<Matrix> a_blocks;
  // Block from level 1 down to the boundary (M1 x M0).
  Matrix b_minus1;
  // b_blocks[k] holds B_k; B_0 is M0 x M0, B_k (k>=1) is M0 x M1.
  std::vector<Matrix> b_blocks;
  TailSpec tail;

  int ka() const { return static_cast<int>(a_blocks.size()) - 2; }
  int kb() const { return static_cast<int>(b_blocks.size()) - 1; }

  // Block values for any index, filling from the tail formula beyond the
  // explicit lists. a(k) is defined for k >= -1, b(k) for k >= 0.
  Matrix a(int k) const;
  Matrix b(int k) const;

  // Row-sum closures: bar_a(j) = sum_{l>j} A_l and the doubly-cumulated
  // tails dbar_a(k) = sum_{j>k} bar_a(j) (as column row-sum vectors).
  Matrix bar_a(int j) const;
  Matrix bar_b(int j) const;
  Vector dbar_a_rowsum(int k) const;
  Vector dbar_b_rowsum(int k) const;
};

// Parse and validate a model file (JSON, see README for the schema).
MG1Model load_model(const std::string& path);

// Parse from an in-memory JSON string (same schema as load_model).
MG1Model parse_model(const std::string& text);

// Validation used by both entry points: shapes, entry ranges, row sums
// within 1e-9 after tail closure, tail parameter sanity. Rows are never
// renormalized; defects are errors.
void validate(const MG1Model& model);

struct MaterializedBlocks {
  // a[i] = A_{i-1} for i = 0..k_max+1; b[i] = B_{i-1} likewise
  // (b[0] is the down block B_{-1}).
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  int k_max = 0;
};

// Expand the model into explicit blocks up to index k_max (>= the
// explicit range; indices beyond it are filled from the tail formula).
MaterializedBlocks materialize_blocks(const MG1Model& model, int k_max);

// The level-increment truncation of a model at level n: blocks are kept
// up to n-1 and the entire remaining tail is lumped into index n.
struct TruncatedModel {
  int n = 0;
  int m0 = 0;
  int m1 = 0;
  // a_trunc[i] = A^(N)_{i-1}, i = 0..n+1;  b_trunc[k] = B^(N)_k, k = 0..n.
  std::vector<Matrix> a_trunc;
  Matrix b_minus1;
  std::vector<Matrix> b_trunc;

  const Matrix& a(int k) const { return a_trunc[static_cast<size_t>(k) + 1]; }
  const Matrix& b(int k) const { return b_trunc[static_cast<size_t>(k)]; }
};

TruncatedModel truncate(const MG1Model& model, int n);

// Mean-drift quantities of the repeating part.
struct DriftReport {
  RowVector varpi;     // stationary phase distribution of A = sum A_k
  Vector m_bar_a;      // per-phase mean level increment
  Vector m_bar_a_plus; // per-phase mean upward increment (k >= 1 only)
  Vector m_bar_b;      // boundary mean upward increment
  double sigma = 0.0;  // varpi * m_bar_a; negative iff stable
  bool stable = false;
};

DriftReport drift(const MG1Model& model);

enum class CheckStatus { pass, fail, unknown };

struct AssumptionCheck {
  CheckStatus status = CheckStatus::unknown;
  std::string note;
};

// Stability / aperiodicity / light-tail / tail-regularity report.
// Reports, never aborts. The aperiodicity check is deferred to the
// spectral gap of the solved G matrix and comes back "unknown" here.
struct AssumptionReport {
  AssumptionCheck stability;
  AssumptionCheck aperiodicity;
  AssumptionCheck light_tail;
  AssumptionCheck tail_regularity;
  double sigma = 0.0;
  double r = 0.0;  // min decay radius; +inf for finite tails
  double f_power = 0.0;
  bool a_irreducible = false;
};

AssumptionReport validate_assumptions(const MG1Model& model);

// Closed-form decay data of a declared geometric_power tail: radii of
// the block generating series, the power factor f(N) = N^f_power, and
// the limit coefficients of the doubly-cumulated tail row sums
//   c_A = lim dbar_A(N) e / (r^-N f(N)),
// with the faster-decaying side zeroed when the radii differ. When the
// radii agree but the power exponents differ, f takes the larger
// exponent and the slower factor's coefficient is zeroed (flagged as
// heuristic).
struct TailDecay {
  bool available = false;  // true iff tail kind is geometric_power
  double r_a = 0.0;        // +inf when the A tail has zero coefficients
  double r_b = 0.0;
  double r = 0.0;
  double f_power = 0.0;
  bool f_heuristic = false;
  Vector c_a;
  Vector c_b;
  double c_star = 0.0;
};

TailDecay tail_decay(const MG1Model& model);

// Scalar tail series helpers (exposed for tests).
//
// tail_mass_series:     sum_{l=from}^inf l^(alpha-1) gamma^l
// tail_weighted_series: sum_{l=from}^inf (l-offset) l^(alpha-1) gamma^l
//
// Closed forms are used for alpha == 1; otherwise terms are accumulated
// until the next term drops below 1e-16 of the running sum.
double tail_mass_series(double gamma, double alpha, long from);
double tail_weighted_series(double gamma, double alpha, long from, double offset);

}  // namespace mg1li
