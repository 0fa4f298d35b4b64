#pragma once

#include <cstdint>
#include <string>

namespace padsolve::checks {

// One property-check run: `trials` inputs exercised, `failures` of them
// violating the contract (first violation described in `detail`).
struct CheckReport {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::string detail;

  bool ok() const { return trials > 0 && failures == 0; }
};

// Olson's threshold: every sequence of 3p-2 vectors in F_p^2 has a zero-sum
// subsequence of length <= p.  Exhaustive enumeration is only feasible at
// p = 3 (9^7 sequences); the random variant draws seeded sequences.
CheckReport check_olson_exhaustive(std::uint32_t p);
CheckReport check_olson_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed);

// Cauchy-Davenport: |A+B| >= min(p, |A|+|B|-1) for nonempty A, B in F_p,
// with the sumset witnesses re-verified against a double loop.
CheckReport check_cd_exhaustive(std::uint32_t p);  // all subset pairs, p <= 7
CheckReport check_cd_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed);

// Constrained pair solver: every assignment of 3p-3 nonzero columns admits a
// zero-sum subset meeting the first p indices.  Exhaustive only at p = 3.
CheckReport check_prop71_exhaustive(std::uint32_t p);
CheckReport check_prop71_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed);

// Valuation-one contraction: n_min(p) random primitive vectors mod p^3 always
// yield a witness of size <= p with both sums zero mod p, not both mod p^2.
CheckReport check_alon_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed,
                              bool strict);

// Davenport constant of F_p^2: every sequence of 2p-1 vectors has a nonempty
// zero-sum subsequence, and some sequence of 2p-2 has none (sharpness).
CheckReport check_davenport_exhaustive(std::uint32_t p);  // p = 3 only
CheckReport check_davenport_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed);

// Exact transformation law of the theta invariant under equivalence moves:
// theta(A') = theta(A) + C(s,2) (e0 + e1 + ord det U) + d (s-1) sum(nu_i),
// on seeded random (system, move) pairs with both sides finite.
CheckReport check_theta_law(std::uint64_t samples, std::uint64_t seed);

// Subset oracle vs. naive 2^s enumeration (p = 3, tau = 1, s <= 12): equal
// existence verdicts and identical colex-minimal certificates.
CheckReport check_oracle_equivalence(std::uint64_t samples, std::uint64_t seed);

}  // namespace padsolve::checks
