#pragma once

#include "padsolve/system.hpp"
#include "padsolve/zerosum.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace padsolve::congr {

// All solutions are in subset form: the returned indices are the variables
// assigned 1, every other variable is 0.  This loses nothing mod p because
// x^(p-1) is 0 or 1, and any unit value contributes exactly the coefficient.

// Exactly p-1 unit coefficients; returns S (possibly empty) with
// sum_{i in S} as[i] == target (mod p).  Witness chain: the cumulative
// sumsets S_k = S_{k-1} + {0, a_k} cover F_p by Cauchy-Davenport; backtracking
// prefers skipping an index when the target is already reachable without it.
std::vector<std::size_t> solve_single_target(std::span<const std::uint32_t> as,
                                             std::uint32_t target, std::uint32_t p);

// Exactly p coefficients, zeros allowed; returns nonempty S with zero sum.
std::vector<std::size_t> solve_single_nontrivial(std::span<const std::uint32_t> as,
                                                 std::uint32_t p);

// 2p-1 columns, each nonzero mod p, the last p-1 all in one projective class;
// returns S with both coordinate sums zero mod p and S intersecting the first
// p indices.  Realized by a basis change sending the tail class to (1 : 0).
std::vector<std::size_t> solve_pair_class_tail(std::span<const zerosum::FpVec2> cols,
                                               std::uint32_t p);

// Exactly 3p-3 columns, each nonzero mod p; returns the lexicographically
// smallest S with both sums zero mod p and S intersecting the first p
// indices.  A witness exists for every valid input; if the DP ever exhausts,
// that input would be a counterexample and is reported as a fatal error.
std::vector<std::size_t> solve_pair_constrained(std::span<const zerosum::FpVec2> cols,
                                                std::uint32_t p);

// Independent oracle: the colex-minimal nonempty subset S of columns with
// both coefficient sums == 0 mod p^{tau+1} and the mod-p reductions of the
// S-columns spanning rank 2, or nullopt if no such subset exists.  DP over
// (sum mod p^{tau+1})^2 x rank-state with a streaming first-reachable-step
// table and backward reconstruction.
std::optional<std::vector<std::size_t>> oracle_subset_solution(const model::System& sys);

}  // namespace padsolve::congr
