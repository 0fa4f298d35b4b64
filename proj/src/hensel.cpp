#include "padsolve/hensel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace padsolve::hensel {

namespace {

std::uint32_t inv_mod_p(std::uint32_t x, std::uint32_t p) {
  std::uint32_t r = 1;
  std::uint64_t b = x % p, e = p - 2;
  while (e) {
    if (e & 1) r = static_cast<std::uint32_t>(r * b % p);
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

}  // namespace

LiftedSolution lift(const model::System& sys, const pipeline::Certificate& cert,
                    unsigned target) {
  const padic::Ring& ring = sys.ring();
  const unsigned tau = sys.tau();
  const unsigned K = ring.precision();
  if (!pipeline::verify(sys, cert)) throw std::invalid_argument("certificate does not verify");
  if (target < tau + 1 || target > K)
    throw std::invalid_argument("lift target must lie in [tau+1, K]");
  const std::uint32_t p = static_cast<std::uint32_t>(ring.prime());
  const u128 d = sys.degree();

  // Pivot pair: the first two support columns in distinct projective classes
  // mod p.  Their mod-p matrix is invertible, and it never changes across
  // stages because every unit value satisfies x^d == 1 mod p.
  std::size_t i0 = cert.support.size(), i1 = cert.support.size();
  std::uint32_t cls0 = 0;
  for (std::size_t j = 0; j < cert.support.size(); ++j) {
    const model::Column& col = sys.column(cert.support[j]);
    if (col.a % p == 0 && col.b % p == 0) continue;
    std::uint32_t c = model::proj_class_of(col.a, col.b, ring, 0);
    if (i0 == cert.support.size()) {
      i0 = j;
      cls0 = c;
    } else if (c != cls0) {
      i1 = j;
      break;
    }
  }
  if (i1 == cert.support.size()) throw std::logic_error("verified certificate lost rank 2");
  const model::Column& c0 = sys.column(cert.support[i0]);
  const model::Column& c1 = sys.column(cert.support[i1]);
  const std::uint32_t a0 = static_cast<std::uint32_t>(c0.a % p);
  const std::uint32_t b0 = static_cast<std::uint32_t>(c0.b % p);
  const std::uint32_t a1 = static_cast<std::uint32_t>(c1.a % p);
  const std::uint32_t b1 = static_cast<std::uint32_t>(c1.b % p);
  const std::uint32_t det =
      static_cast<std::uint32_t>(((std::uint64_t{a0} * b1 + std::uint64_t{p} * p) -
                                  std::uint64_t{a1} * b0) %
                                 p);
  if (det == 0) throw std::logic_error("pivot pair determinant vanished mod p");
  const std::uint32_t dinv = inv_mod_p(det, p);

  LiftedSolution sol;
  sol.support = cert.support;
  sol.values.assign(cert.support.size(), 1);

  auto residual = [&](u128& fa, u128& fb) {
    fa = 0;
    fb = 0;
    for (std::size_t j = 0; j < sol.support.size(); ++j) {
      const model::Column& col = sys.column(sol.support[j]);
      u128 xd = ring.pow(sol.values[j], d);
      fa = ring.add(fa, ring.mul(col.a, xd));
      fb = ring.add(fb, ring.mul(col.b, xd));
    }
  };

  u128 fa = 0, fb = 0;
  residual(fa, fb);
  for (unsigned k = tau + 1; k < target; ++k) {
    if (ring.vord(fa) < k || ring.vord(fb) < k)
      throw std::logic_error("residual valuation regressed at stage " + std::to_string(k));
    u128 pk = ring.pow_p(k);
    std::uint32_t ra = static_cast<std::uint32_t>(fa / pk % p);
    std::uint32_t rb = static_cast<std::uint32_t>(fb / pk % p);
    // Solve a0 w0 + a1 w1 = ra, b0 w0 + b1 w1 = rb over F_p.
    std::uint32_t w0 = static_cast<std::uint32_t>(
        (std::uint64_t{dinv} * ((std::uint64_t{b1} * ra + std::uint64_t{p} * p - std::uint64_t{a1} * rb) % p)) % p);
    std::uint32_t w1 = static_cast<std::uint32_t>(
        (std::uint64_t{dinv} * ((std::uint64_t{a0} * rb + std::uint64_t{p} * p - std::uint64_t{b0} * ra) % p)) % p);
    u128 step = ring.pow_p(k - tau);
    sol.values[i0] = ring.mul(sol.values[i0], ring.add(1, ring.mul(w0, step)));
    sol.values[i1] = ring.mul(sol.values[i1], ring.add(1, ring.mul(w1, step)));
    residual(fa, fb);
    if (ring.vord(fa) < k + 1 || ring.vord(fb) < k + 1)
      throw std::logic_error("Newton step failed to gain a digit at stage " + std::to_string(k));
    sol.trace.push_back({k + 1, ring.vord(fa), ring.vord(fb)});
  }
  sol.precision = target;
  if (!check_solution(sys, sol)) throw std::logic_error("lifted solution failed its own check");
  return sol;
}

bool check_solution(const model::System& sys, const LiftedSolution& sol) {
  const padic::Ring& ring = sys.ring();
  if (sol.precision < 1 || sol.precision > ring.precision()) return false;
  if (sol.support.size() != sol.values.size() || sol.support.empty()) return false;
  for (std::size_t j = 0; j < sol.support.size(); ++j) {
    if (sol.support[j] >= sys.size()) return false;
    if (j > 0 && sol.support[j] <= sol.support[j - 1]) return false;
  }
  const u128 p = ring.prime();
  const u128 m = ring.pow_p(sol.precision);
  bool unit = false;
  u128 fa = 0, fb = 0;
  for (std::size_t j = 0; j < sol.support.size(); ++j) {
    u128 x = ring.reduce(sol.values[j]);
    if (x % p != 0) unit = true;
    const model::Column& col = sys.column(sol.support[j]);
    u128 xd = ring.pow(x, sys.degree());
    fa = ring.add(fa, ring.mul(col.a, xd));
    fb = ring.add(fb, ring.mul(col.b, xd));
  }
  return unit && fa % m == 0 && fb % m == 0;
}

}  // namespace padsolve::hensel
