#include <cstdint>
#include <stdexcept>

#include "doctest.h"
#include "padsolve/padic.hpp"

using namespace padsolve;

namespace {

// Independent valuation: count factors of p by repeated division.
unsigned naive_vord(u128 x, std::uint64_t p, unsigned cap) {
  if (x == 0) return cap;
  unsigned v = 0;
  while (v < cap && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

}  // namespace

TEST_CASE("ring construction validates its arguments") {
  CHECK_THROWS_AS(padic::Ring(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(padic::Ring(4, 3), std::invalid_argument);
  CHECK_THROWS_AS(padic::Ring(9, 2), std::invalid_argument);
  CHECK_THROWS_AS(padic::Ring(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(padic::Ring(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(padic::Ring(3, 90), std::invalid_argument);  // 3^90 > 2^126
  CHECK_NOTHROW(padic::Ring(3, 79));                           // 3^79 < 2^126
}

TEST_CASE("modular arithmetic matches plain integer arithmetic") {
  padic::Ring ring(3, 5);
  const std::uint64_t m = 243;
  REQUIRE(ring.modulus() == m);
  for (std::uint64_t a = 0; a < m; a += 7)
    for (std::uint64_t b = 0; b < m; b += 11) {
      CHECK(ring.add(a, b) == (a + b) % m);
      CHECK(ring.sub(a, b) == (a + m - b % m) % m);
      CHECK(ring.mul(a, b) == a * b % m);
      CHECK(ring.neg(a) == (m - a % m) % m);
    }
  CHECK(ring.reduce(m + 5) == 5);
  CHECK(ring.pow_p(0) == 1);
  CHECK(ring.pow_p(5) == m);
  CHECK_THROWS_AS(ring.pow_p(6), std::invalid_argument);
}

TEST_CASE("wide moduli stay exact") {
  // 13^34 ~ 2^125.8 exercises the non-narrow multiply path.
  padic::Ring ring(13, 34);
  u128 x = ring.modulus() - 1;
  CHECK(ring.mul(x, x) == 1);  // (-1)^2
  CHECK(ring.add(x, 1) == 0);
  CHECK(ring.pow(x, 3) == x);  // (-1)^3
  CHECK(ring.mul(ring.inv(12345), 12345) == 1);
}

TEST_CASE("valuation matches repeated division") {
  padic::Ring ring(3, 4);
  for (u128 x = 0; x < 81; ++x) CHECK(ring.vord(x) == naive_vord(x, 3, 4));
  CHECK(ring.vord(0) == 4);  // "at least K"
}

TEST_CASE("pow matches repeated multiplication") {
  padic::Ring ring(5, 6);
  for (u128 base : {u128{0}, u128{2}, u128{5}, u128{7}, u128{15624}}) {
    u128 acc = 1;
    for (unsigned e = 0; e < 12; ++e) {
      CHECK(ring.pow(base, e) == acc);
      acc = ring.mul(acc, base);
    }
  }
}

TEST_CASE("every unit has an inverse; non-units throw") {
  padic::Ring ring(3, 5);
  for (u128 x = 0; x < ring.modulus(); ++x) {
    if (x % 3 == 0) {
      CHECK_FALSE(ring.is_unit(x));
      CHECK_THROWS_AS(ring.inv(x), std::invalid_argument);
    } else {
      CHECK(ring.mul(ring.inv(x), x) == 1);
    }
  }
}

TEST_CASE("degree is p^tau (p-1) and needs tau + 1 observable digits") {
  padic::Ring ring(3, 5);
  CHECK(ring.degree(0) == 2);
  CHECK(ring.degree(1) == 6);
  CHECK(ring.degree(4) == 162);
  CHECK_THROWS_AS(ring.degree(5), std::invalid_argument);
}

TEST_CASE("d-th powers of units are 1 mod p^(tau+1)") {
  padic::Ring ring(5, 4);
  unsigned tau = 1;
  u128 d = ring.degree(tau);  // 20
  u128 ptau1 = ring.pow_p(tau + 1);
  for (u128 x = 1; x < ring.modulus(); ++x) {
    if (!ring.is_unit(x)) continue;
    u128 xd = ring.unit_pow_d(x, tau);
    CHECK(xd == ring.pow(x, d));
    CHECK(xd % ptau1 == 1);
  }
  CHECK_THROWS_AS(ring.unit_pow_d(5, 1), std::invalid_argument);
}

TEST_CASE("u128 decimal strings round-trip") {
  u128 big = (static_cast<u128>(0x123456789abcdefULL) << 64) | 0xfedcba9876543210ULL;
  CHECK(u128_from_string(u128_to_string(big)) == big);
  CHECK(u128_to_string(0) == "0");
  CHECK(u128_from_string("340282366920938463463374607431768211455") == ~static_cast<u128>(0));
  CHECK_THROWS_AS(u128_from_string(""), std::invalid_argument);
  CHECK_THROWS_AS(u128_from_string("12x"), std::invalid_argument);
  CHECK_THROWS_AS(u128_from_string("340282366920938463463374607431768211456"),
                  std::invalid_argument);
}
