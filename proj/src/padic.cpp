#include "padsolve/padic.hpp"

#include <limits>
#include <stdexcept>

namespace padsolve {

std::string u128_to_string(u128 x) {
  if (x == 0) return "0";
  std::string out;
  while (x > 0) {
    out.push_back(static_cast<char>('0' + static_cast<unsigned>(x % 10)));
    x /= 10;
  }
  return {out.rbegin(), out.rend()};
}

u128 u128_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  constexpr u128 kMax = ~static_cast<u128>(0);
  u128 x = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("bad digit in integer literal: " + s);
    unsigned d = static_cast<unsigned>(c - '0');
    if (x > (kMax - d) / 10) throw std::invalid_argument("integer literal overflows 128 bits: " + s);
    x = x * 10 + d;
  }
  return x;
}

namespace padic {

namespace {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

}  // namespace

Ring::Ring(std::uint64_t p, unsigned precision) : p_(p), k_(precision) {
  if (p < 3 || p % 2 == 0 || !is_prime(p))
    throw std::invalid_argument("p must be an odd prime, got " + std::to_string(p));
  if (k_ < 1) throw std::invalid_argument("precision must be at least 1");
  constexpr u128 kCap = static_cast<u128>(1) << 126;
  ppow_.reserve(k_ + 1);
  ppow_.push_back(1);
  for (unsigned i = 0; i < k_; ++i) {
    u128 prev = ppow_.back();
    if (prev > kCap / p_)
      throw std::invalid_argument("p^K exceeds the 2^126 representable cap");
    ppow_.push_back(prev * p_);
  }
  narrow_ = ppow_[k_] <= std::numeric_limits<std::uint64_t>::max();
}

u128 Ring::pow_p(unsigned e) const {
  if (e > k_) throw std::invalid_argument("p^e requested beyond precision");
  return ppow_[e];
}

u128 Ring::add(u128 a, u128 b) const {
  u128 m = ppow_[k_];
  a %= m;
  b %= m;
  u128 s = a + b;  // no overflow: a, b < 2^126
  return s >= m ? s - m : s;
}

u128 Ring::sub(u128 a, u128 b) const {
  u128 m = ppow_[k_];
  a %= m;
  b %= m;
  return a >= b ? a - b : m - (b - a);
}

u128 Ring::neg(u128 a) const {
  u128 m = ppow_[k_];
  a %= m;
  return a == 0 ? 0 : m - a;
}

u128 Ring::mul(u128 a, u128 b) const {
  u128 m = ppow_[k_];
  a %= m;
  b %= m;
  if (narrow_) return a * b % m;  // both < 2^64, product fits 128 bits
  // double-and-add; a + a cannot overflow since m < 2^126
  u128 acc = 0;
  while (b > 0) {
    if (b & 1) {
      acc += a;
      if (acc >= m) acc -= m;
    }
    a += a;
    if (a >= m) a -= m;
    b >>= 1;
  }
  return acc;
}

u128 Ring::pow(u128 base, u128 exp) const {
  u128 acc = 1 % ppow_[k_];
  base %= ppow_[k_];
  while (exp > 0) {
    if (exp & 1) acc = mul(acc, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return acc;
}

unsigned Ring::vord(u128 x) const {
  x %= ppow_[k_];
  if (x == 0) return k_;
  unsigned e = 0;
  while (x % p_ == 0) {
    x /= p_;
    ++e;
  }
  return e;
}

u128 Ring::inv(u128 x) const {
  x %= ppow_[k_];
  if (!is_unit(x)) throw std::invalid_argument("inverse of a non-unit");
  // Euler: x^(phi - 1), phi = p^(K-1) * (p - 1)
  u128 phi = ppow_[k_ - 1] * (p_ - 1);
  u128 r = pow(x, phi - 1);
  if (mul(r, x) != 1) throw std::logic_error("inverse self-check failed");
  return r;
}

u128 Ring::degree(unsigned tau) const {
  if (tau + 1 > k_) throw std::invalid_argument("tau + 1 exceeds precision");
  return ppow_[tau] * (p_ - 1);
}

u128 Ring::unit_pow_d(u128 x, unsigned tau) const {
  x %= ppow_[k_];
  if (!is_unit(x)) throw std::invalid_argument("unit_pow_d on a non-unit");
  u128 r = pow(x, degree(tau));
  if (r % ppow_[tau + 1] != 1) throw std::logic_error("unit^d != 1 mod p^(tau+1)");
  return r;
}

}  // namespace padic
}  // namespace padsolve
