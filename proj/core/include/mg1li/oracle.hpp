#pragma once

#include "mg1li/model.hpp"
#include "mg1li/ramaswami.hpp"
#include "mg1li/types.hpp"

namespace mg1li {

// How transitions beyond the level cap are handled in the assembled
// finite chain: folded into the top level (keeps the matrix exactly
// stochastic) or dropped with the solution rescaled afterwards.
enum class OracleMethod { lump_last, renormalize };

struct OracleSolution {
  int levels = 0;  // level cap L; states 0..L were solved
  OracleMethod method = OracleMethod::lump_last;
  LevelDistribution pi_hat;
};

// Direct stationary solve of the truncated chain restricted to levels
// 0..levels. The block matrix is assembled densely and solved by GTH
// (lump_last) or by an LU solve of the balance equations with one
// equation replaced by normalization (renormalize). State-space cap:
// levels * M1 <= 2e5.
OracleSolution brute_force_stationary(const TruncatedModel& tm, int levels,
                                      OracleMethod method = OracleMethod::lump_last);

// Default cap rule: the smallest multiple of 50 whose tail mass in the
// given (Ramaswami) solution is below 1e-10.
int default_oracle_levels(const LevelDistribution& pi);

}  // namespace mg1li
