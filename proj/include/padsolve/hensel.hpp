#pragma once

#include "padsolve/pipeline.hpp"
#include "padsolve/system.hpp"

#include <cstdint>
#include <vector>

namespace padsolve::hensel {

struct StageTrace {
  unsigned precision = 0;  // residuals vanish mod p^precision after the stage
  unsigned va = 0, vb = 0;  // residual valuations, capped at K
};

// A sparse solution of the pair: variables outside support are zero, the
// value at support[j] is values[j] (a unit), and both forms vanish
// mod p^precision.
struct LiftedSolution {
  std::vector<std::size_t> support;
  std::vector<u128> values;
  unsigned precision = 0;
  std::vector<StageTrace> trace;
};

// Lifts a verified rank-2 certificate from precision tau+1 to target
// (tau+1 <= target <= K).  Each stage multiplies two fixed pivot variables
// by 1 + p^{k-tau} w; since (1 + p^{k-tau} w)^d == 1 + (p-1) p^k w mod
// p^{k+1} for d = p^tau (p-1), the correction is linear mod p and the pivot
// pair's unit determinant (two distinct projective classes) makes it
// solvable for any residual.  Residual valuations are re-verified after
// every stage; a regression is a logic error, not a soft failure.
LiftedSolution lift(const model::System& sys, const pipeline::Certificate& cert,
                    unsigned target);

// True iff support/values are well-formed, at least one value is a unit,
// and both coefficient sums sum_i a_i x_i^d vanish mod p^precision.
bool check_solution(const model::System& sys, const LiftedSolution& sol);

}  // namespace padsolve::hensel
