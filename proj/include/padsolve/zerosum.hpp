#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "padsolve/padic.hpp"

namespace padsolve::zerosum {

// A vector of F_p^2, both entries already reduced mod p.
struct FpVec2 {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

// A pair of residues mod p^K with min valuation 0 (not both divisible by p).
using PrimitiveVec = std::pair<u128, u128>;

// Conservative zero-sum threshold for sequences in F_p^3 of length-p
// subsequences; the effective threshold below switches to the cheaper
// projective-class route as soon as it needs fewer vectors.
inline constexpr std::uint64_t kAlonConstant = 9996;

// min(kAlonConstant * p, 3p^2 - 2); with strict=true always kAlonConstant * p.
std::uint64_t contraction_threshold(std::uint64_t p, bool strict);

// Exact sumset A + B over F_p with one witness pair per element.
// contains[c] != 0 iff c is a sum; witness[c] = (a, b) with a + b == c (mod p),
// smallest (a, b) in lexicographic order.  Cauchy-Davenport gives
// |A+B| >= min(p, |A| + |B| - 1) for nonempty A, B.
struct Sumset {
  std::vector<std::uint8_t> contains;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> witness;
};
Sumset sumset(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
              std::uint32_t p);

// Zero-sum subsequence of length 1..p out of >= 3p-2 vectors in F_p^2
// (Olson's bound; existence is a theorem at that length).  Returns the
// lexicographically smallest index set, prefix-minimal.
std::vector<std::size_t> olson_zero_sum(std::span<const FpVec2> vs, std::uint32_t p);

// Subset of <= p units mod p^2 whose sum has valuation exactly 1.
// cs are units at ring precision (>= 2); needs >= 3p-2 of them.
std::vector<std::size_t> unit_sum_val_one(std::span<const u128> cs, const padic::Ring& ring);

// Subset of <= p primitive vectors, all in one projective class, whose sum
// is (0,0) mod p but not (0,0) mod p^2; needs >= 3p-2 vectors.
std::vector<std::size_t> class_contraction(std::span<const PrimitiveVec> vs,
                                           const padic::Ring& ring);

// Same contract from >= 3p^2-2 primitive vectors in arbitrary classes
// (pigeonhole puts 3p-2 of them in one class).
std::vector<std::size_t> lift_contraction(std::span<const PrimitiveVec> vs,
                                          const padic::Ring& ring);

// Valuation-one contraction via a length-p zero-sum search in F_p^3 over
// the encoding (v1 mod p, (v1 div p) mod p, v2 mod p), with the documented
// fallbacks: up to three degenerate batches land in class (0:1) and feed
// class_contraction; otherwise a pigeonhole pass over the original input.
// below_guarantee reports length < contraction_threshold(p, strict); the
// search may still succeed there.
struct AlonResult {
  std::optional<std::vector<std::size_t>> witness;
  bool below_guarantee = false;
};
AlonResult alon_lift_contraction(std::span<const PrimitiveVec> vs, const padic::Ring& ring,
                                 bool strict);

// True iff the dense polynomial (n <= 3 variables, per-variable degree
// <= p-1, coefficient at (e1,..,en) stored at index e1 + e2*p + ...)
// vanishes on all of F_p^n.  Equivalent to all coefficients being zero.
bool is_zero_function(std::span<const std::uint32_t> coeffs, unsigned nvars, std::uint32_t p);

}  // namespace padsolve::zerosum
