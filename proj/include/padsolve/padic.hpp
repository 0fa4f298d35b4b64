#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace padsolve {

// Two-limb unsigned integer; wide enough for every modulus this library
// accepts (p^K <= 2^126).
using u128 = unsigned __int128;

std::string u128_to_string(u128 x);
u128 u128_from_string(const std::string& s);  // throws std::invalid_argument

namespace padic {

// Arithmetic context for Z/p^K with p an odd prime and K >= 1.
// Residues are plain u128 values in [0, p^K); the ring carries (p, K).
class Ring {
 public:
  Ring(std::uint64_t p, unsigned precision);

  std::uint64_t prime() const { return p_; }
  unsigned precision() const { return k_; }
  u128 modulus() const { return ppow_[k_]; }
  u128 pow_p(unsigned e) const;  // p^e for e <= K

  u128 reduce(u128 x) const { return x % ppow_[k_]; }
  u128 add(u128 a, u128 b) const;
  u128 sub(u128 a, u128 b) const;
  u128 mul(u128 a, u128 b) const;
  u128 neg(u128 a) const;
  u128 pow(u128 base, u128 exp) const;  // square-and-multiply

  // p-adic valuation of x as a residue mod p^K, in 0..K.
  // A return of K means "at least K" (only x == 0 qualifies).
  unsigned vord(u128 x) const;

  bool is_unit(u128 x) const { return x % p_ != 0; }

  // Inverse of a unit (throws std::invalid_argument otherwise).
  u128 inv(u128 x) const;

  // x^d mod p^K for a unit x, d = p^tau * (p-1).  The unit group mod
  // p^{tau+1} has order exactly d, so the result is 1 mod p^{tau+1};
  // digits beyond tau+1 are where lifting does its work.
  u128 unit_pow_d(u128 x, unsigned tau) const;

  // d = p^tau * (p-1); requires tau + 1 <= K so d's congruence class
  // structure is observable at this precision.
  u128 degree(unsigned tau) const;

 private:
  std::uint64_t p_;
  unsigned k_;
  bool narrow_;  // modulus fits 64 bits: fast multiply path
  std::vector<u128> ppow_;
};

}  // namespace padic
}  // namespace padsolve
