#pragma once

#include "padsolve/padic.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace padsolve::model {

// One variable's coefficient pair: the column (a_i, b_i) of the 2 x s system.
struct Column {
  u128 a = 0;
  u128 b = 0;
};

inline bool operator==(const Column& x, const Column& y) { return x.a == y.a && x.b == y.b; }

// A pair of diagonal forms of degree d = p^tau * (p - 1) in s variables.
// Coefficients are exact integer representatives in [0, p^K); all arithmetic
// on them is exact, so scaling a column down by a power of p recovers the
// integer quotient rather than an approximation.
class System {
 public:
  System(padic::Ring ring, unsigned tau, std::vector<Column> columns);

  const padic::Ring& ring() const { return ring_; }
  unsigned tau() const { return tau_; }
  u128 degree() const { return d_; }
  std::size_t size() const { return cols_.size(); }
  const std::vector<Column>& columns() const { return cols_; }
  const Column& column(std::size_t i) const { return cols_.at(i); }

  // Level = min of the two entry valuations; throws if the column vanishes
  // mod p^K (its level is not observable at working precision).
  unsigned level_of(std::size_t i) const;

  // Projective class of column i after dividing out p^level: ids 0..p-1
  // encode (1 : m), id p encodes (0 : 1).
  std::uint32_t proj_class(std::size_t i) const;

  // census[l] = number of columns at level exactly l, for l = 0..K-1.
  std::vector<std::size_t> level_census() const;

 private:
  padic::Ring ring_;
  unsigned tau_;
  u128 d_;
  std::vector<Column> cols_;
};

// Class of an arbitrary pair after dividing out p^level; requires the divided
// pair to be nonzero mod p.
std::uint32_t proj_class_of(u128 a, u128 b, const padic::Ring& ring, unsigned level);

// Sum over all column pairs of vord(a_i b_j - a_j b_i); nullopt when some
// determinant vanishes mod p^K ("infinite at working precision").
std::optional<std::uint64_t> theta(const System& sys);

// An equivalence transformation, applied in this order: every column is hit
// by row_transform (unit determinant mod p), then row r is scaled by
// p^row_scales[r], then column i is scaled by p^(d * col_scales[i]), then
// columns are permuted so that output column j is input column perm[j].
// Negative scale exponents divide and require exact divisibility.
struct EquivalenceMove {
  std::array<std::array<u128, 2>, 2> row_transform{{{1, 0}, {0, 1}}};
  std::array<std::int64_t, 2> row_scales{0, 0};
  std::vector<std::size_t> perm;         // empty = identity
  std::vector<std::int64_t> col_scales;  // empty = all zero
};

System apply_move(const System& sys, const EquivalenceMove& mv);

struct NormalizeResult {
  System system;
  std::vector<EquivalenceMove> trace;
  bool bounds_ok = false;
  std::string diagnostic;  // names the violated bound or stall when !bounds_ok
};

// Greedy descent: scale down columns divisible by p^d, divide rows that are
// divisible by p, and when all level-0 columns share one projective class,
// divide out the direction annihilating it.  Every move strictly lowers the
// theta invariant, so the loop halts; afterwards the normalized-system bounds
// are checked and reported.
NormalizeResult normalize(const System& sys);

// The bounds a normalized system must satisfy, as exact integer comparisons:
// d*(m_0+...+m_l) >= (l+1)*s for l = 0..tau, and 2*d*q_0 >= s.
bool check_level_bounds(const System& sys, std::string* diagnostic = nullptr);

// q = #H minus the largest projective class multiplicity within H; every H
// column must be at level 0.
std::size_t q_of(const System& sys, std::span<const std::size_t> H);

struct SelectHResult {
  std::vector<std::size_t> H;  // empty on failure
  std::size_t q = 0;
  std::string diagnostic;  // nonempty on failure, names the failed inequality
};

// Pick H among the level-0 columns with 2p^{tau+1}-1 <= #H <= 2p^{tau+1} and
// q(H) >= p^{tau+1}.  Requires m_0 >= 2p^{tau+1}-1 and q_0 >= p^{tau+1};
// keeps lowest-index columns when trimming.
SelectHResult select_H(const System& sys);

}  // namespace padsolve::model
