#include "padsolve/checks.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "padsolve/congruence.hpp"
#include "padsolve/pipeline.hpp"
#include "padsolve/system.hpp"
#include "padsolve/zerosum.hpp"

namespace padsolve::checks {

namespace {

using zerosum::FpVec2;

// Independent verification arithmetic: plain integer loops, no reuse of the
// library's internal sum or class logic.

bool ascending_valid(const std::vector<std::size_t>& S, std::size_t n) {
  if (S.empty()) return false;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S[i] >= n) return false;
    if (i > 0 && S[i] <= S[i - 1]) return false;
  }
  return true;
}

bool zero_sum_mod(const std::vector<FpVec2>& vs, const std::vector<std::size_t>& S,
                  std::uint32_t p) {
  std::uint64_t sa = 0, sb = 0;
  for (std::size_t i : S) {
    sa += vs[i].a;
    sb += vs[i].b;
  }
  return sa % p == 0 && sb % p == 0;
}

void record_failure(CheckReport& rep, const std::string& what) {
  ++rep.failures;
  if (rep.detail.empty()) rep.detail = what;
}

std::string seq_string(const std::vector<FpVec2>& vs) {
  std::string out = "[";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += " ";
    out += "(" + std::to_string(vs[i].a) + "," + std::to_string(vs[i].b) + ")";
  }
  return out + "]";
}

void olson_trial(CheckReport& rep, const std::vector<FpVec2>& vs, std::uint32_t p) {
  ++rep.trials;
  try {
    auto S = zerosum::olson_zero_sum(vs, p);
    if (!ascending_valid(S, vs.size()) || S.size() > p || !zero_sum_mod(vs, S, p))
      record_failure(rep, "bad witness on " + seq_string(vs));
  } catch (const std::exception& e) {
    record_failure(rep, std::string(e.what()) + " on " + seq_string(vs));
  }
}

void prop71_trial(CheckReport& rep, const std::vector<FpVec2>& vs, std::uint32_t p) {
  ++rep.trials;
  try {
    auto S = congr::solve_pair_constrained(vs, p);
    if (!ascending_valid(S, vs.size()) || !zero_sum_mod(vs, S, p) || S.front() >= p)
      record_failure(rep, "bad witness on " + seq_string(vs));
  } catch (const std::exception& e) {
    record_failure(rep, std::string(e.what()) + " on " + seq_string(vs));
  }
}

void cd_trial(CheckReport& rep, std::uint32_t am, std::uint32_t bm, std::uint32_t p) {
  ++rep.trials;
  std::vector<std::uint8_t> a(p, 0), b(p, 0);
  std::size_t na = 0, nb = 0;
  for (std::uint32_t v = 0; v < p; ++v) {
    if (am >> v & 1) {
      a[v] = 1;
      ++na;
    }
    if (bm >> v & 1) {
      b[v] = 1;
      ++nb;
    }
  }
  try {
    auto ss = zerosum::sumset(a, b, p);
    std::size_t got = 0;
    for (std::uint32_t c = 0; c < p; ++c) {
      bool expect = false;
      for (std::uint32_t x = 0; x < p && !expect; ++x)
        for (std::uint32_t y = 0; y < p && !expect; ++y)
          if (a[x] && b[y] && (x + y) % p == c) expect = true;
      if (static_cast<bool>(ss.contains[c]) != expect) {
        record_failure(rep, "membership mismatch at " + std::to_string(c));
        return;
      }
      if (ss.contains[c]) {
        ++got;
        auto [wa, wb] = ss.witness[c];
        if (!a[wa] || !b[wb] || (wa + wb) % p != c) {
          record_failure(rep, "invalid witness at " + std::to_string(c));
          return;
        }
      }
    }
    if (got < std::min<std::size_t>(p, na + nb - 1))
      record_failure(rep, "sumset below the Cauchy-Davenport bound");
  } catch (const std::exception& e) {
    record_failure(rep, e.what());
  }
}

// True iff some nonempty subsequence sums to zero in F_p^2 (brute force).
bool has_zero_sum(const std::vector<FpVec2>& vs, std::uint32_t p) {
  std::size_t n = vs.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::uint64_t sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        sa += vs[i].a;
        sb += vs[i].b;
      }
    if (sa % p == 0 && sb % p == 0) return true;
  }
  return false;
}

void davenport_trial(CheckReport& rep, const std::vector<FpVec2>& vs, std::uint32_t p) {
  ++rep.trials;
  if (!has_zero_sum(vs, p))
    record_failure(rep, "no zero-sum subsequence in " + seq_string(vs));
}

void davenport_sharpness(CheckReport& rep, std::uint32_t p) {
  // (1,0) and (0,1), each p-1 times: 2p-2 vectors with no zero-sum subset.
  std::vector<FpVec2> vs;
  for (std::uint32_t i = 0; i + 1 < p; ++i) {
    vs.push_back({1, 0});
    vs.push_back({0, 1});
  }
  ++rep.trials;
  if (has_zero_sum(vs, p))
    record_failure(rep, "sharpness example of length 2p-2 has a zero-sum subsequence");
}

}  // namespace

CheckReport check_olson_exhaustive(std::uint32_t p) {
  if (p != 3) throw std::invalid_argument("exhaustive zero-sum check is only feasible at p = 3");
  CheckReport rep;
  rep.name = "olson exhaustive p=3";
  const std::size_t n = 7;  // 3p - 2
  std::vector<std::uint32_t> code(n, 0);
  std::vector<FpVec2> vs(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) vs[i] = {code[i] / 3, code[i] % 3};
    olson_trial(rep, vs, 3);
    std::size_t d = 0;
    while (d < n && ++code[d] == 9) code[d++] = 0;
    if (d == n) break;
  }
  return rep;
}

CheckReport check_olson_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "olson random p=" + std::to_string(p);
  std::mt19937_64 rng(seed);
  const std::size_t n = 3 * static_cast<std::size_t>(p) - 2;
  std::vector<FpVec2> vs(n);
  for (std::uint64_t t = 0; t < samples; ++t) {
    for (auto& v : vs) v = {static_cast<std::uint32_t>(rng() % p), static_cast<std::uint32_t>(rng() % p)};
    olson_trial(rep, vs, p);
  }
  return rep;
}

CheckReport check_cd_exhaustive(std::uint32_t p) {
  if (p > 7) throw std::invalid_argument("exhaustive sumset check supports p <= 7");
  CheckReport rep;
  rep.name = "cauchy-davenport exhaustive p=" + std::to_string(p);
  const std::uint32_t full = (1u << p) - 1;
  for (std::uint32_t am = 1; am <= full; ++am)
    for (std::uint32_t bm = 1; bm <= full; ++bm) cd_trial(rep, am, bm, p);
  return rep;
}

CheckReport check_cd_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed) {
  if (p > 31) throw std::invalid_argument("sumset check supports p <= 31");
  CheckReport rep;
  rep.name = "cauchy-davenport random p=" + std::to_string(p);
  std::mt19937_64 rng(seed);
  const std::uint32_t full = (1u << p) - 1;
  for (std::uint64_t t = 0; t < samples; ++t) {
    std::uint32_t am = 0, bm = 0;
    while (am == 0) am = static_cast<std::uint32_t>(rng()) & full;
    while (bm == 0) bm = static_cast<std::uint32_t>(rng()) & full;
    cd_trial(rep, am, bm, p);
  }
  return rep;
}

CheckReport check_prop71_exhaustive(std::uint32_t p) {
  if (p != 3) throw std::invalid_argument("exhaustive constrained-pair check is only feasible at p = 3");
  CheckReport rep;
  rep.name = "constrained pair exhaustive p=3";
  const std::size_t n = 6;  // 3p - 3
  std::vector<std::uint32_t> code(n, 0);
  std::vector<FpVec2> vs(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t v = code[i] + 1;  // 1..8: the nonzero vectors of F_3^2
      vs[i] = {v / 3, v % 3};
    }
    prop71_trial(rep, vs, 3);
    std::size_t d = 0;
    while (d < n && ++code[d] == 8) code[d++] = 0;
    if (d == n) break;
  }
  return rep;
}

CheckReport check_prop71_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "constrained pair random p=" + std::to_string(p);
  std::mt19937_64 rng(seed);
  const std::size_t n = 3 * static_cast<std::size_t>(p) - 3;
  const std::uint32_t nz = p * p - 1;
  std::vector<FpVec2> vs(n);
  for (std::uint64_t t = 0; t < samples; ++t) {
    for (auto& v : vs) {
      std::uint32_t c = 1 + static_cast<std::uint32_t>(rng() % nz);
      v = {c / p, c % p};
    }
    prop71_trial(rep, vs, p);
  }
  return rep;
}

CheckReport check_alon_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed,
                              bool strict) {
  CheckReport rep;
  rep.name = "valuation-one contraction random p=" + std::to_string(p) + (strict ? " strict" : "");
  std::mt19937_64 rng(seed);
  padic::Ring ring(p, 3);
  const std::uint64_t p3 = static_cast<std::uint64_t>(p) * p * p;
  const std::size_t n = static_cast<std::size_t>(zerosum::contraction_threshold(p, strict));
  std::vector<zerosum::PrimitiveVec> vs(n);
  for (std::uint64_t t = 0; t < samples; ++t) {
    for (auto& v : vs) {
      std::uint64_t a = 0, b = 0;
      do {
        a = rng() % p3;
        b = rng() % p3;
      } while (a % p == 0 && b % p == 0);
      v = {a, b};
    }
    ++rep.trials;
    try {
      auto res = zerosum::alon_lift_contraction(vs, ring, strict);
      if (res.below_guarantee) {
        record_failure(rep, "threshold-length input reported below guarantee");
        continue;
      }
      if (!res.witness) {
        record_failure(rep, "no witness at guaranteed length");
        continue;
      }
      const auto& S = *res.witness;
      std::uint64_t sa = 0, sb = 0;
      bool okidx = ascending_valid(S, n) && S.size() <= p;
      for (std::size_t i : S) {
        sa += static_cast<std::uint64_t>(vs[i].first);
        sb += static_cast<std::uint64_t>(vs[i].second);
      }
      const std::uint64_t p2 = static_cast<std::uint64_t>(p) * p;
      if (!okidx || sa % p != 0 || sb % p != 0 || (sa % p2 == 0 && sb % p2 == 0))
        record_failure(rep, "bad contraction witness at trial " + std::to_string(t));
    } catch (const std::exception& e) {
      record_failure(rep, std::string(e.what()) + " at trial " + std::to_string(t));
    }
  }
  return rep;
}

CheckReport check_davenport_exhaustive(std::uint32_t p) {
  if (p != 3) throw std::invalid_argument("exhaustive Davenport check is only feasible at p = 3");
  CheckReport rep;
  rep.name = "davenport exhaustive p=3";
  const std::size_t n = 5;  // 2p - 1
  std::vector<std::uint32_t> code(n, 0);
  std::vector<FpVec2> vs(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) vs[i] = {code[i] / 3, code[i] % 3};
    davenport_trial(rep, vs, 3);
    std::size_t d = 0;
    while (d < n && ++code[d] == 9) code[d++] = 0;
    if (d == n) break;
  }
  davenport_sharpness(rep, 3);
  return rep;
}

CheckReport check_davenport_random(std::uint32_t p, std::uint64_t samples, std::uint64_t seed) {
  if (p > 13) throw std::invalid_argument("Davenport brute force supports p <= 13");
  CheckReport rep;
  rep.name = "davenport random p=" + std::to_string(p);
  std::mt19937_64 rng(seed);
  const std::size_t n = 2 * static_cast<std::size_t>(p) - 1;
  std::vector<FpVec2> vs(n);
  for (std::uint64_t t = 0; t < samples; ++t) {
    for (auto& v : vs) v = {static_cast<std::uint32_t>(rng() % p), static_cast<std::uint32_t>(rng() % p)};
    davenport_trial(rep, vs, p);
  }
  davenport_sharpness(rep, p);
  return rep;
}

CheckReport check_theta_law(std::uint64_t samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "theta transformation law";
  std::mt19937_64 rng(seed);
  const std::uint32_t p = 3;
  const unsigned tau = 1, K = 24;
  padic::Ring ring(p, K);
  const std::uint64_t d = static_cast<std::uint64_t>(ring.degree(tau));  // p^tau (p-1)
  const std::uint64_t p4 = 81;
  while (rep.trials < samples) {
    std::size_t s = 3 + rng() % 4;
    // entries below p^4 keep every determinant valuation far from K
    std::vector<model::Column> cols(s);
    for (auto& c : cols) {
      c.a = 1 + rng() % (p4 - 1);
      c.b = rng() % p4;
    }
    model::System sys(ring, tau, cols);
    auto t0 = model::theta(sys);
    if (!t0) continue;  // only finite-theta inputs are in scope

    model::EquivalenceMove mv;
    do {
      for (auto& row : mv.row_transform)
        for (auto& e : row) e = rng() % 9;
    } while ((mv.row_transform[0][0] * mv.row_transform[1][1] +
              2 * (mv.row_transform[0][1] * mv.row_transform[1][0])) %
                 3 ==
             0);  // det == a d - b c == a d + 2 b c mod 3; reject non-units
    std::uint64_t e0 = rng() % 3, e1 = rng() % 3;
    mv.row_scales = {static_cast<std::int64_t>(e0), static_cast<std::int64_t>(e1)};
    std::uint64_t nu_sum = 0;
    mv.col_scales.assign(s, 0);
    for (auto& nu : mv.col_scales) {
      nu = static_cast<std::int64_t>(rng() % 2);
      nu_sum += static_cast<std::uint64_t>(nu);
    }
    mv.perm.resize(s);
    std::iota(mv.perm.begin(), mv.perm.end(), std::size_t{0});
    std::shuffle(mv.perm.begin(), mv.perm.end(), rng);

    model::System sys2 = model::apply_move(sys, mv);
    auto t1 = model::theta(sys2);
    if (!t1) continue;  // wrapped past working precision; out of scope
    ++rep.trials;
    std::uint64_t pairs = s * (s - 1) / 2;
    std::uint64_t expected = *t0 + pairs * (e0 + e1) + d * (s - 1) * nu_sum;
    if (*t1 != expected)
      record_failure(rep, "theta " + std::to_string(*t0) + " -> " + std::to_string(*t1) +
                              ", expected " + std::to_string(expected) + " (s=" +
                              std::to_string(s) + ", e0=" + std::to_string(e0) + ", e1=" +
                              std::to_string(e1) + ", sum nu=" + std::to_string(nu_sum) + ")");
  }
  return rep;
}

CheckReport check_oracle_equivalence(std::uint64_t samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "oracle vs subset enumeration";
  std::mt19937_64 rng(seed);
  const std::uint32_t p = 3;
  padic::Ring ring(p, 3);
  const std::uint64_t m = 27, T = 9;
  for (std::uint64_t t = 0; t < samples; ++t) {
    std::size_t s = 1 + rng() % 12;
    std::vector<model::Column> cols(s);
    for (auto& c : cols) {
      c.a = rng() % m;
      c.b = rng() % m;
    }
    model::System sys(ring, 1, cols);
    ++rep.trials;

    std::optional<std::vector<std::size_t>> want;
    for (std::uint32_t mask = 1; mask < (1u << s) && !want; ++mask) {
      std::uint64_t sa = 0, sb = 0;
      std::uint32_t cls_seen = 0;  // bitmask over p+1 classes of unit columns
      for (std::size_t i = 0; i < s; ++i) {
        if (!(mask >> i & 1)) continue;
        std::uint64_t a = static_cast<std::uint64_t>(cols[i].a);
        std::uint64_t b = static_cast<std::uint64_t>(cols[i].b);
        sa += a;
        sb += b;
        if (a % p == 0 && b % p == 0) continue;
        std::uint32_t c = a % p != 0
                              ? static_cast<std::uint32_t>(b % p * (a % p == 1 ? 1 : 2) % p)
                              : p;  // b/a mod 3; inverse of 2 is 2
        cls_seen |= 1u << c;
      }
      bool rank2 = (cls_seen & (cls_seen - 1)) != 0;
      if (rank2 && sa % T == 0 && sb % T == 0) {
        std::vector<std::size_t> sel;
        for (std::size_t i = 0; i < s; ++i)
          if (mask >> i & 1) sel.push_back(i);
        want = std::move(sel);
      }
    }

    try {
      auto got = congr::oracle_subset_solution(sys);
      if (got.has_value() != want.has_value()) {
        record_failure(rep, "existence mismatch at trial " + std::to_string(t));
        continue;
      }
      if (got) {
        // The largest witness index is forced: both searches stop at the
        // shortest column prefix containing any witness.  Smaller indices may
        // differ (the oracle's greedy reconstruction is not colex-minimal).
        if (got->back() != want->back()) {
          record_failure(rep, "witness prefix-length mismatch at trial " + std::to_string(t));
          continue;
        }
        pipeline::Certificate cert{*got, T};
        if (!pipeline::verify(sys, cert))
          record_failure(rep, "oracle certificate failed verification at trial " + std::to_string(t));
      }
    } catch (const std::exception& e) {
      record_failure(rep, std::string(e.what()) + " at trial " + std::to_string(t));
    }
  }
  return rep;
}

}  // namespace padsolve::checks
