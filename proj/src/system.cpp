#include "padsolve/system.hpp"

#include <algorithm>
#include <stdexcept>

namespace padsolve::model {

namespace {

std::uint64_t inv_mod_p(std::uint64_t x, std::uint64_t p) {
  // x^(p-2) mod p.
  std::uint64_t r = 1, base = x % p, e = p - 2;
  while (e) {
    if (e & 1) r = static_cast<std::uint64_t>((u128)r * base % p);
    base = static_cast<std::uint64_t>((u128)base * base % p);
    e >>= 1;
  }
  return r;
}

// min(d * |nu|, cap) without u128 overflow; cap <= 126.
unsigned scaled_exponent(u128 d, std::int64_t nu, unsigned cap) {
  u128 mag = nu < 0 ? static_cast<u128>(-(nu + 1)) + 1 : static_cast<u128>(nu);
  if (mag == 0) return 0;
  if (d >= cap) return cap;
  u128 f = d * (mag > cap ? static_cast<u128>(cap) : mag);
  return f >= cap ? cap : static_cast<unsigned>(f);
}

}  // namespace

System::System(padic::Ring ring, unsigned tau, std::vector<Column> columns)
    : ring_(std::move(ring)), tau_(tau), cols_(std::move(columns)) {
  if (ring_.precision() < tau_ + 2)
    throw std::invalid_argument("precision K must be at least tau + 2");
  if (cols_.empty()) throw std::invalid_argument("system needs at least one column");
  d_ = ring_.pow_p(tau_) * (ring_.prime() - 1);
  for (auto& c : cols_) {
    c.a = ring_.reduce(c.a);
    c.b = ring_.reduce(c.b);
  }
}

unsigned System::level_of(std::size_t i) const {
  const Column& c = column(i);
  unsigned l = std::min(ring_.vord(c.a), ring_.vord(c.b));
  if (l >= ring_.precision())
    throw std::domain_error("column vanishes mod p^K; its level is not observable");
  return l;
}

std::uint32_t System::proj_class(std::size_t i) const {
  const Column& c = column(i);
  return proj_class_of(c.a, c.b, ring_, level_of(i));
}

std::vector<std::size_t> System::level_census() const {
  std::vector<std::size_t> census(ring_.precision(), 0);
  for (std::size_t i = 0; i < cols_.size(); ++i) ++census[level_of(i)];
  return census;
}

std::uint32_t proj_class_of(u128 a, u128 b, const padic::Ring& ring, unsigned level) {
  u128 pe = ring.pow_p(level);
  std::uint64_t p = ring.prime();
  std::uint64_t ra = static_cast<std::uint64_t>((a / pe) % p);
  std::uint64_t rb = static_cast<std::uint64_t>((b / pe) % p);
  if (ra == 0 && rb == 0)
    throw std::invalid_argument("pair is not primitive at the stated level");
  if (ra == 0) return static_cast<std::uint32_t>(p);
  return static_cast<std::uint32_t>(rb * inv_mod_p(ra, p) % p);
}

std::optional<std::uint64_t> theta(const System& sys) {
  const auto& cols = sys.columns();
  const auto& ring = sys.ring();
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < cols.size(); ++i)
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      u128 det = ring.sub(ring.mul(cols[i].a, cols[j].b), ring.mul(cols[j].a, cols[i].b));
      if (det == 0) return std::nullopt;
      total += ring.vord(det);
    }
  return total;
}

System apply_move(const System& sys, const EquivalenceMove& mv) {
  const auto& ring = sys.ring();
  unsigned K = ring.precision();
  std::size_t s = sys.size();

  if (!mv.perm.empty()) {
    if (mv.perm.size() != s) throw std::invalid_argument("perm length mismatch");
    std::vector<std::uint8_t> seen(s, 0);
    for (std::size_t j : mv.perm) {
      if (j >= s || seen[j]) throw std::invalid_argument("perm is not a permutation");
      seen[j] = 1;
    }
  }
  if (!mv.col_scales.empty() && mv.col_scales.size() != s)
    throw std::invalid_argument("col_scales length mismatch");

  u128 u00 = ring.reduce(mv.row_transform[0][0]), u01 = ring.reduce(mv.row_transform[0][1]);
  u128 u10 = ring.reduce(mv.row_transform[1][0]), u11 = ring.reduce(mv.row_transform[1][1]);
  u128 det = ring.sub(ring.mul(u00, u11), ring.mul(u01, u10));
  if (det == 0 || ring.vord(det) != 0)
    throw std::invalid_argument("row transform determinant is not a unit");

  std::vector<Column> out(sys.columns());
  for (auto& c : out) {
    u128 a = ring.add(ring.mul(u00, c.a), ring.mul(u01, c.b));
    u128 b = ring.add(ring.mul(u10, c.a), ring.mul(u11, c.b));
    c = {a, b};
  }

  auto scale_entry = [&](u128 x, std::int64_t e, u128 dfactor) -> u128 {
    // Multiplies (e > 0) or exactly divides (e < 0) by p^(dfactor * |e|).
    unsigned f = scaled_exponent(dfactor, e, K);
    if (e >= 0) return f >= K ? 0 : ring.mul(x, ring.pow_p(f));
    if (x == 0) return 0;
    if (f >= K || ring.vord(x) < f)
      throw std::invalid_argument("scaling divides a non-divisible entry (precision underflow)");
    return x / ring.pow_p(f);
  };

  for (unsigned r = 0; r < 2; ++r) {
    std::int64_t e = mv.row_scales[r];
    if (e == 0) continue;
    for (auto& c : out) {
      u128& x = r == 0 ? c.a : c.b;
      x = scale_entry(x, e, 1);
    }
  }

  if (!mv.col_scales.empty()) {
    u128 d = sys.degree();
    for (std::size_t i = 0; i < s; ++i) {
      out[i].a = scale_entry(out[i].a, mv.col_scales[i], d);
      out[i].b = scale_entry(out[i].b, mv.col_scales[i], d);
    }
  }

  if (!mv.perm.empty()) {
    std::vector<Column> perm_out(s);
    for (std::size_t j = 0; j < s; ++j) perm_out[j] = out[mv.perm[j]];
    out = std::move(perm_out);
  }

  return System(ring, sys.tau(), std::move(out));
}

bool check_level_bounds(const System& sys, std::string* diagnostic) {
  u128 d = sys.degree();
  u128 s = sys.size();
  auto census = sys.level_census();

  u128 cum = 0;
  for (unsigned l = 0; l <= sys.tau(); ++l) {
    cum += l < census.size() ? census[l] : 0;
    if (d * cum < (static_cast<u128>(l) + 1) * s) {
      if (diagnostic)
        *diagnostic = "level bound failed at l = " + std::to_string(l) + ": d*(m_0+...+m_" +
                      std::to_string(l) + ") = " + u128_to_string(d * cum) + " < " +
                      std::to_string(l + 1) + "*s = " + u128_to_string((static_cast<u128>(l) + 1) * s);
      return false;
    }
  }

  std::vector<std::size_t> level0;
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (sys.level_of(i) == 0) level0.push_back(i);
  u128 q0 = q_of(sys, level0);
  if (2 * d * q0 < s) {
    if (diagnostic)
      *diagnostic = "q bound failed: 2*d*q_0 = " + u128_to_string(2 * d * q0) + " < s = " +
                    u128_to_string(s);
    return false;
  }
  if (diagnostic) diagnostic->clear();
  return true;
}

NormalizeResult normalize(const System& sys) {
  const auto& ring = sys.ring();
  unsigned K = ring.precision();
  std::uint64_t p = ring.prime();

  for (std::size_t i = 0; i < sys.size(); ++i) {
    const Column& c = sys.column(i);
    if (c.a == 0 && c.b == 0)
      return {sys, {}, false,
              "column " + std::to_string(i) + " vanishes mod p^K; theta is not finite"};
  }

  System cur = sys;
  std::vector<EquivalenceMove> trace;
  std::string stall;
  unsigned budget = 64 + 8 * K;

  for (unsigned iter = 0; iter < budget; ++iter) {
    std::size_t s = cur.size();

    // Scale down every column divisible by p^d.
    u128 d = cur.degree();
    EquivalenceMove mv;
    mv.col_scales.assign(s, 0);
    bool any = false;
    for (std::size_t i = 0; i < s; ++i) {
      u128 q = static_cast<u128>(cur.level_of(i)) / d;
      if (q > 0) {
        mv.col_scales[i] = -static_cast<std::int64_t>(q);
        any = true;
      }
    }
    if (any) {
      cur = apply_move(cur, mv);
      trace.push_back(std::move(mv));
      continue;
    }

    // Divide out any common p-power of a whole row.
    unsigned m0 = K, m1 = K;
    for (const auto& c : cur.columns()) {
      m0 = std::min(m0, ring.vord(c.a));
      m1 = std::min(m1, ring.vord(c.b));
    }
    if (m0 >= K || m1 >= K) {
      stall = std::string("row ") + (m0 >= K ? "0" : "1") +
              " is identically zero mod p^K; theta is not finite";
      break;
    }
    if (m0 > 0 || m1 > 0) {
      EquivalenceMove rowmv;
      rowmv.row_scales = {-static_cast<std::int64_t>(m0), -static_cast<std::int64_t>(m1)};
      cur = apply_move(cur, rowmv);
      trace.push_back(std::move(rowmv));
      continue;
    }

    // All level-0 columns in one class (1 : c): divide out the direction
    // c*a - b that annihilates them.  (Class (0:1) cannot occur here: m0 = 0
    // puts some unit in row 0.)
    std::uint32_t cls = 0;
    bool first = true, single = true;
    for (std::size_t i = 0; i < s; ++i) {
      if (cur.level_of(i) != 0) continue;
      std::uint32_t c = cur.proj_class(i);
      if (first) {
        cls = c;
        first = false;
      } else if (c != cls) {
        single = false;
        break;
      }
    }
    if (!first && single && cls < p) {
      EquivalenceMove dirmv;
      dirmv.row_transform = {{{cls, p - 1}, {1, 0}}};
      dirmv.row_scales = {-1, 0};
      System next = apply_move(cur, dirmv);
      if (next.columns() == cur.columns()) {
        // Fixed point: the forms are proportional, so theta is not finite.
        stall = "direction move left the system unchanged; theta is not finite";
        break;
      }
      cur = std::move(next);
      trace.push_back(std::move(dirmv));
      continue;
    }

    break;  // no move applies
  }

  NormalizeResult res{std::move(cur), std::move(trace), false, ""};
  std::string bound_diag;
  res.bounds_ok = check_level_bounds(res.system, &bound_diag);
  if (!res.bounds_ok) res.diagnostic = stall.empty() ? bound_diag : stall + "; " + bound_diag;
  return res;
}

std::size_t q_of(const System& sys, std::span<const std::size_t> H) {
  if (H.empty()) return 0;
  std::uint64_t p = sys.ring().prime();
  std::vector<std::size_t> count(p + 1, 0);
  for (std::size_t i : H) {
    if (sys.level_of(i) != 0) throw std::invalid_argument("q_of requires level-0 columns");
    ++count[sys.proj_class(i)];
  }
  return H.size() - *std::max_element(count.begin(), count.end());
}

SelectHResult select_H(const System& sys) {
  const auto& ring = sys.ring();
  std::uint64_t p = ring.prime();
  u128 T128 = ring.pow_p(sys.tau() + 1);

  std::vector<std::size_t> level0;
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (sys.level_of(i) == 0) level0.push_back(i);

  SelectHResult res;
  if (2 * T128 - 1 > static_cast<u128>(level0.size())) {
    res.diagnostic = "insufficient variables: m_0 = " + std::to_string(level0.size()) +
                     " < 2*p^(tau+1) - 1 = " + u128_to_string(2 * T128 - 1);
    return res;
  }
  std::size_t T = static_cast<std::size_t>(T128);

  std::vector<std::vector<std::size_t>> byclass(p + 1);
  for (std::size_t i : level0) byclass[sys.proj_class(i)].push_back(i);
  std::size_t big = 0;
  for (std::size_t c = 1; c <= p; ++c)
    if (byclass[c].size() > byclass[big].size()) big = c;
  std::size_t I0 = byclass[big].size();
  std::size_t q0 = level0.size() - I0;
  if (q0 < T) {
    res.diagnostic = "insufficient variables: q_0 = " + std::to_string(q0) +
                     " < p^(tau+1) = " + std::to_string(T);
    return res;
  }

  std::vector<std::size_t> others;
  for (std::size_t i : level0)
    if (sys.proj_class(i) != big) others.push_back(i);

  std::vector<std::size_t> H;
  if (I0 >= T) {
    H.assign(byclass[big].begin(), byclass[big].begin() + T);
    H.insert(H.end(), others.begin(), others.begin() + T);
  } else {
    H = byclass[big];
    H.insert(H.end(), others.begin(), others.begin() + (2 * T - 1 - I0));
  }
  std::sort(H.begin(), H.end());

  res.q = q_of(sys, H);
  if (res.q < T) throw std::logic_error("select_H produced q(H) below p^(tau+1)");
  res.H = std::move(H);
  return res;
}

}  // namespace padsolve::model
