#include "padsolve/zerosum.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace padsolve::zerosum {

namespace {

// Canonical projective class id of a nonzero vector of F_p^2:
// 0..p-1 for (1 : m), p for (0 : 1).
std::uint32_t class_id(std::uint32_t a, std::uint32_t b, std::uint32_t p,
                       const std::vector<std::uint32_t>& inv_table) {
  if (a != 0) return static_cast<std::uint32_t>((static_cast<std::uint64_t>(b) * inv_table[a]) % p);
  return p;
}

std::vector<std::uint32_t> make_inv_table(std::uint32_t p) {
  std::vector<std::uint32_t> inv(p, 0);
  for (std::uint32_t x = 1; x < p; ++x)
    for (std::uint32_t y = 1; y < p; ++y)
      if (x * y % p == 1) {
        inv[x] = y;
        break;
      }
  return inv;
}

void check_sum_val_one(std::span<const PrimitiveVec> vs, const std::vector<std::size_t>& idx,
                       const padic::Ring& ring, std::uint32_t p) {
  if (idx.empty() || idx.size() > p) throw std::logic_error("contraction size out of range");
  u128 sa = 0, sb = 0;
  for (std::size_t i : idx) {
    sa = ring.add(sa, vs[i].first);
    sb = ring.add(sb, vs[i].second);
  }
  unsigned va = ring.vord(sa), vb = ring.vord(sb);
  if (va < 1 || vb < 1 || std::min(va, vb) != 1)
    throw std::logic_error("contraction sum does not land exactly one level up");
}

}  // namespace

std::uint64_t contraction_threshold(std::uint64_t p, bool strict) {
  std::uint64_t cp = kAlonConstant * p;
  if (strict) return cp;
  return std::min<std::uint64_t>(cp, 3 * p * p - 2);
}

Sumset sumset(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
              std::uint32_t p) {
  if (a.size() != p || b.size() != p) throw std::invalid_argument("sumset arguments must be indicator vectors over F_p");
  Sumset out;
  out.contains.assign(p, 0);
  out.witness.assign(p, {0, 0});
  for (std::uint32_t x = 0; x < p; ++x) {
    if (!a[x]) continue;
    for (std::uint32_t y = 0; y < p; ++y) {
      if (!b[y]) continue;
      std::uint32_t c = (x + y) % p;
      if (!out.contains[c]) {
        out.contains[c] = 1;
        out.witness[c] = {x, y};
      }
    }
  }
  return out;
}

std::vector<std::size_t> olson_zero_sum(std::span<const FpVec2> vs, std::uint32_t p) {
  std::size_t n = vs.size();
  if (n + 2 < 3 * static_cast<std::size_t>(p))
    throw std::invalid_argument("olson_zero_sum needs at least 3p-2 vectors");
  for (const auto& v : vs)
    if (v.a >= p || v.b >= p) throw std::invalid_argument("vector entry not reduced mod p");

  // feas[i][t][s]: some subset of vs[i..) of size exactly t sums to s.
  std::uint32_t nsums = p * p;
  auto idx = [&](std::size_t i, std::uint32_t t, std::uint32_t s) {
    return (i * (p + 1) + t) * nsums + s;
  };
  std::vector<std::uint8_t> feas((n + 1) * (p + 1) * nsums, 0);
  feas[idx(n, 0, 0)] = 1;
  for (std::size_t i = n; i-- > 0;) {
    for (std::uint32_t t = 0; t <= p; ++t)
      for (std::uint32_t s = 0; s < nsums; ++s) {
        std::uint8_t ok = feas[idx(i + 1, t, s)];
        if (!ok && t > 0) {
          std::uint32_t sa = s / p, sb = s % p;
          std::uint32_t pa = (sa + p - vs[i].a) % p, pb = (sb + p - vs[i].b) % p;
          ok = feas[idx(i + 1, t - 1, pa * p + pb)];
        }
        feas[idx(i, t, s)] = ok;
      }
  }

  // Greedy lexicographically-smallest extraction, prefix-minimal: stop the
  // moment the chosen prefix itself sums to zero.
  std::vector<std::size_t> chosen;
  std::uint32_t cur_a = 0, cur_b = 0;
  for (std::size_t i = 0; i < n && chosen.size() < p; ++i) {
    std::uint32_t na = (cur_a + vs[i].a) % p, nb = (cur_b + vs[i].b) % p;
    std::uint32_t need = ((p - na) % p) * p + ((p - nb) % p);
    bool extendable = false;
    std::uint32_t budget = p - static_cast<std::uint32_t>(chosen.size()) - 1;
    for (std::uint32_t t = 0; t <= budget; ++t) {
      if (t == 0 && need != 0) continue;
      if (feas[idx(i + 1, t, need)]) {
        extendable = true;
        break;
      }
    }
    if (!extendable) continue;
    chosen.push_back(i);
    cur_a = na;
    cur_b = nb;
    if (cur_a == 0 && cur_b == 0) break;
  }
  if (chosen.empty() || cur_a != 0 || cur_b != 0)
    throw std::logic_error("zero-sum guarantee violated (would contradict Olson's theorem)");
  return chosen;
}

std::vector<std::size_t> unit_sum_val_one(std::span<const u128> cs, const padic::Ring& ring) {
  std::uint32_t p = static_cast<std::uint32_t>(ring.prime());
  if (ring.precision() < 2) throw std::invalid_argument("need precision >= 2");
  std::vector<FpVec2> enc;
  enc.reserve(cs.size());
  u128 p2 = ring.pow_p(2);
  for (u128 c : cs) {
    if (!ring.is_unit(c)) throw std::invalid_argument("unit_sum_val_one on a non-unit");
    u128 r = c % p2;
    enc.push_back({static_cast<std::uint32_t>(r % p), static_cast<std::uint32_t>(r / p)});
  }
  auto sel = olson_zero_sum(enc, p);
  u128 sum = 0;
  for (std::size_t i : sel) sum = ring.add(sum, cs[i]);
  // a-parts are units summing to a positive multiple of p below p^2
  if (ring.vord(sum) != 1) throw std::logic_error("unit subset sum valuation is not exactly 1");
  return sel;
}

std::vector<std::size_t> class_contraction(std::span<const PrimitiveVec> vs,
                                           const padic::Ring& ring) {
  std::uint32_t p = static_cast<std::uint32_t>(ring.prime());
  if (vs.size() + 2 < 3 * static_cast<std::size_t>(p))
    throw std::invalid_argument("class_contraction needs at least 3p-2 vectors");
  auto inv = make_inv_table(p);
  std::uint32_t cls = 0;
  bool first = true;
  for (const auto& v : vs) {
    std::uint32_t a = static_cast<std::uint32_t>(v.first % p);
    std::uint32_t b = static_cast<std::uint32_t>(v.second % p);
    if (a == 0 && b == 0) throw std::invalid_argument("class_contraction on a non-primitive vector");
    std::uint32_t c = class_id(a, b, p, inv);
    if (first) {
      cls = c;
      first = false;
    } else if (c != cls) {
      throw std::invalid_argument("class_contraction vectors span more than one class");
    }
  }
  // The class representative has a unit in coordinate 0 for (1:m), in
  // coordinate 1 for (0:1); every member is a unit multiple of it mod p.
  bool use_second = (cls == p);
  std::vector<u128> coords;
  coords.reserve(vs.size());
  for (const auto& v : vs) coords.push_back(use_second ? v.second : v.first);
  auto sel = unit_sum_val_one(coords, ring);
  check_sum_val_one(vs, sel, ring, p);
  return sel;
}

std::vector<std::size_t> lift_contraction(std::span<const PrimitiveVec> vs,
                                          const padic::Ring& ring) {
  std::uint32_t p = static_cast<std::uint32_t>(ring.prime());
  if (vs.size() + 2 < 3 * static_cast<std::size_t>(p) * p)
    throw std::invalid_argument("lift_contraction needs at least 3p^2-2 vectors");
  auto inv = make_inv_table(p);
  std::vector<std::vector<std::size_t>> byclass(p + 1);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    std::uint32_t a = static_cast<std::uint32_t>(vs[i].first % p);
    std::uint32_t b = static_cast<std::uint32_t>(vs[i].second % p);
    if (a == 0 && b == 0) throw std::invalid_argument("lift_contraction on a non-primitive vector");
    byclass[class_id(a, b, p, inv)].push_back(i);
  }
  std::size_t need = 3 * static_cast<std::size_t>(p) - 2;
  for (std::uint32_t c = 0; c <= p; ++c) {
    if (byclass[c].size() < need) continue;
    std::vector<PrimitiveVec> sub;
    sub.reserve(need);
    for (std::size_t j = 0; j < need; ++j) sub.push_back(vs[byclass[c][j]]);
    auto sel = class_contraction(sub, ring);
    std::vector<std::size_t> out;
    out.reserve(sel.size());
    for (std::size_t j : sel) out.push_back(byclass[c][j]);
    std::sort(out.begin(), out.end());
    check_sum_val_one(vs, out, ring, p);
    return out;
  }
  throw std::logic_error("pigeonhole failed with 3p^2-2 vectors over p+1 classes");
}

namespace {

// Lexicographically smallest subset of size exactly p of ws (vectors in
// F_p^3) with zero sum, or nullopt.
std::optional<std::vector<std::size_t>> exact_p_zero_sum(
    const std::vector<std::array<std::uint32_t, 3>>& ws, std::uint32_t p) {
  std::size_t n = ws.size();
  if (n < p) return std::nullopt;
  std::uint32_t nsums = p * p * p;
  auto enc = [&](std::uint32_t x, std::uint32_t y, std::uint32_t z) {
    return (x * p + y) * p + z;
  };
  auto idx = [&](std::size_t i, std::uint32_t t, std::uint32_t s) {
    return (i * (p + 1) + t) * nsums + s;
  };
  std::vector<std::uint8_t> feas((n + 1) * (p + 1) * nsums, 0);
  feas[idx(n, 0, 0)] = 1;
  for (std::size_t i = n; i-- > 0;) {
    for (std::uint32_t t = 0; t <= p; ++t)
      for (std::uint32_t s = 0; s < nsums; ++s) {
        std::uint8_t ok = feas[idx(i + 1, t, s)];
        if (!ok && t > 0) {
          std::uint32_t x = s / (p * p), y = s / p % p, z = s % p;
          std::uint32_t px = (x + p - ws[i][0]) % p;
          std::uint32_t py = (y + p - ws[i][1]) % p;
          std::uint32_t pz = (z + p - ws[i][2]) % p;
          ok = feas[idx(i + 1, t - 1, enc(px, py, pz))];
        }
        feas[idx(i, t, s)] = ok;
      }
  }
  if (!feas[idx(0, p, 0)]) return std::nullopt;
  std::vector<std::size_t> chosen;
  std::uint32_t ca = 0, cb = 0, cc = 0;
  for (std::size_t i = 0; i < n && chosen.size() < p; ++i) {
    std::uint32_t na = (ca + ws[i][0]) % p, nb = (cb + ws[i][1]) % p, nc = (cc + ws[i][2]) % p;
    std::uint32_t left = p - static_cast<std::uint32_t>(chosen.size()) - 1;
    std::uint32_t need = enc((p - na) % p, (p - nb) % p, (p - nc) % p);
    if (!feas[idx(i + 1, left, need)]) continue;
    chosen.push_back(i);
    ca = na;
    cb = nb;
    cc = nc;
  }
  if (chosen.size() != p || ca || cb || cc)
    throw std::logic_error("exact-length zero-sum reconstruction failed");
  return chosen;
}

}  // namespace

AlonResult alon_lift_contraction(std::span<const PrimitiveVec> vs, const padic::Ring& ring,
                                 bool strict) {
  std::uint32_t p = static_cast<std::uint32_t>(ring.prime());
  if (ring.precision() < 2) throw std::invalid_argument("need precision >= 2");
  AlonResult res;
  res.below_guarantee = vs.size() < contraction_threshold(p, strict);

  u128 p2 = ring.pow_p(2);
  for (const auto& v : vs)
    if (v.first % p == 0 && v.second % p == 0)
      throw std::invalid_argument("alon_lift_contraction on a non-primitive vector");

  std::vector<std::size_t> pool(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) pool[i] = i;
  std::vector<std::size_t> degenerate;  // removed class-(0:1) batches

  for (int round = 0; round < 3 && pool.size() >= p; ++round) {
    std::vector<std::array<std::uint32_t, 3>> ws;
    ws.reserve(pool.size());
    for (std::size_t i : pool) {
      u128 r = vs[i].first % p2;
      ws.push_back({static_cast<std::uint32_t>(r % p), static_cast<std::uint32_t>(r / p),
                    static_cast<std::uint32_t>(vs[i].second % p)});
    }
    auto sel = exact_p_zero_sum(ws, p);
    if (!sel) break;
    std::uint64_t a_total = 0;
    for (std::size_t j : *sel) a_total += ws[j][0];
    if (a_total > 0) {
      std::vector<std::size_t> out;
      out.reserve(sel->size());
      for (std::size_t j : *sel) out.push_back(pool[j]);
      check_sum_val_one(vs, out, ring, p);
      res.witness = std::move(out);
      return res;
    }
    // all first coordinates divisible by p: the batch sits in class (0:1);
    // set it aside and retry on the rest
    std::vector<std::size_t> keep;
    keep.reserve(pool.size() - p);
    std::size_t si = 0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (si < sel->size() && (*sel)[si] == j) {
        degenerate.push_back(pool[j]);
        ++si;
      } else {
        keep.push_back(pool[j]);
      }
    }
    pool = std::move(keep);
  }

  std::size_t need = 3 * static_cast<std::size_t>(p) - 2;
  if (degenerate.size() >= need) {
    std::vector<PrimitiveVec> sub;
    sub.reserve(need);
    for (std::size_t j = 0; j < need; ++j) sub.push_back(vs[degenerate[j]]);
    auto sel = class_contraction(sub, ring);
    std::vector<std::size_t> out;
    for (std::size_t j : sel) out.push_back(degenerate[j]);
    std::sort(out.begin(), out.end());
    check_sum_val_one(vs, out, ring, p);
    res.witness = std::move(out);
    return res;
  }

  // Last resort: a single class holds 3p-2 of the original vectors whenever
  // the input is at least 3p^2-2 long.
  if (vs.size() + 2 >= 3 * static_cast<std::size_t>(p) * p) {
    res.witness = lift_contraction(vs, ring);
    return res;
  }
  if (!res.below_guarantee)
    throw std::logic_error("contraction guarantee violated above threshold");
  return res;
}

bool is_zero_function(std::span<const std::uint32_t> coeffs, unsigned nvars, std::uint32_t p) {
  if (nvars < 1 || nvars > 3) throw std::invalid_argument("is_zero_function supports 1..3 variables");
  std::size_t want = 1;
  for (unsigned i = 0; i < nvars; ++i) want *= p;
  if (coeffs.size() != want) throw std::invalid_argument("coefficient table has wrong size");
  for (std::uint32_t c : coeffs)
    if (c >= p) throw std::invalid_argument("coefficient not reduced mod p");

  // Evaluate at every point; per-variable degree <= p-1 is structural here.
  std::vector<std::vector<std::uint32_t>> powtab(p, std::vector<std::uint32_t>(p));
  for (std::uint32_t x = 0; x < p; ++x) {
    powtab[x][0] = 1;
    for (std::uint32_t e = 1; e < p; ++e)
      powtab[x][e] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(powtab[x][e - 1]) * x % p);
  }
  std::vector<std::uint32_t> point(nvars, 0);
  while (true) {
    std::uint64_t acc = 0;
    for (std::size_t ci = 0; ci < coeffs.size(); ++ci) {
      if (coeffs[ci] == 0) continue;
      std::size_t rest = ci;
      std::uint64_t term = coeffs[ci];
      for (unsigned v = 0; v < nvars; ++v) {
        term = term * powtab[point[v]][rest % p] % p;
        rest /= p;
      }
      acc = (acc + term) % p;
    }
    if (acc != 0) return false;
    unsigned v = 0;
    while (v < nvars && ++point[v] == p) point[v++] = 0;
    if (v == nvars) break;
  }
  return true;
}

}  // namespace padsolve::zerosum
