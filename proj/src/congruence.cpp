#include "padsolve/congruence.hpp"

#include <algorithm>
#include <stdexcept>

namespace padsolve::congr {

namespace {

using zerosum::FpVec2;

std::uint32_t inv_mod_p(std::uint32_t x, std::uint32_t p) {
  std::uint64_t r = 1, base = x % p, e = p - 2;
  while (e) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

// Class ids: 0..p-1 encode (1 : m), p encodes (0 : 1).
std::uint32_t class_of(FpVec2 v, std::uint32_t p) {
  if (v.a == 0 && v.b == 0) throw std::invalid_argument("zero vector has no projective class");
  if (v.a == 0) return p;
  return static_cast<std::uint32_t>(static_cast<std::uint64_t>(v.b) * inv_mod_p(v.a, p) % p);
}

void check_reduced_units(std::span<const std::uint32_t> as, std::uint32_t p) {
  for (std::uint32_t a : as)
    if (a == 0 || a >= p) throw std::invalid_argument("coefficient is not a unit mod p");
}

}  // namespace

std::vector<std::size_t> solve_single_target(std::span<const std::uint32_t> as,
                                             std::uint32_t target, std::uint32_t p) {
  if (as.size() + 1 != p) throw std::invalid_argument("need exactly p-1 coefficients");
  if (target >= p) throw std::invalid_argument("target not reduced mod p");
  check_reduced_units(as, p);

  std::size_t n = as.size();
  // reach[k][v]: v is a subset sum of as[0..k).
  std::vector<std::uint8_t> reach((n + 1) * p, 0);
  reach[0] = 1;  // k = 0, v = 0
  for (std::size_t k = 0; k < n; ++k)
    for (std::uint32_t v = 0; v < p; ++v)
      reach[(k + 1) * p + v] =
          reach[k * p + v] | reach[k * p + (v + p - as[k]) % p];
  if (!reach[n * p + target])
    throw std::logic_error(
        "target unreachable (would contradict the Cauchy-Davenport sumset bound)");

  std::vector<std::size_t> sel;
  std::uint32_t v = target;
  for (std::size_t k = n; k-- > 0;) {
    if (reach[k * p + v]) continue;  // prefer skipping as[k]
    sel.push_back(k);
    v = (v + p - as[k]) % p;
  }
  if (v != 0) throw std::logic_error("sumset witness reconstruction lost the target");
  std::reverse(sel.begin(), sel.end());

  std::uint32_t sum = 0;
  for (std::size_t i : sel) sum = (sum + as[i]) % p;
  if (sum != target) throw std::logic_error("subset sum does not hit the target");
  return sel;
}

std::vector<std::size_t> solve_single_nontrivial(std::span<const std::uint32_t> as,
                                                 std::uint32_t p) {
  if (as.size() != p) throw std::invalid_argument("need exactly p coefficients");
  for (std::uint32_t a : as)
    if (a >= p) throw std::invalid_argument("coefficient not reduced mod p");

  for (std::size_t i = 0; i < as.size(); ++i)
    if (as[i] == 0) return {i};

  auto sel = solve_single_target(as.subspan(0, p - 1), (p - as[p - 1]) % p, p);
  sel.push_back(p - 1);

  std::uint32_t sum = 0;
  for (std::size_t i : sel) sum = (sum + as[i]) % p;
  if (sel.empty() || sum != 0) throw std::logic_error("nontrivial zero-sum subset is invalid");
  return sel;
}

std::vector<std::size_t> solve_pair_class_tail(std::span<const FpVec2> cols, std::uint32_t p) {
  if (cols.size() + 1 != 2 * static_cast<std::size_t>(p))
    throw std::invalid_argument("need exactly 2p-1 columns");
  for (const auto& c : cols)
    if ((c.a == 0 && c.b == 0) || c.a >= p || c.b >= p)
      throw std::invalid_argument("column is zero or not reduced mod p");
  std::uint32_t tail_cls = class_of(cols[p], p);
  for (std::size_t i = p; i < cols.size(); ++i)
    if (class_of(cols[i], p) != tail_cls)
      throw std::invalid_argument("tail columns do not share one projective class");

  // Basis change W with W * (tail representative) in class (1 : 0).
  std::uint32_t u = cols[p].a, w = cols[p].b;
  std::uint32_t w00, w01, w10, w11;
  if (w != 0) {
    w00 = 0, w01 = 1, w10 = w, w11 = (p - u) % p;
  } else {
    w00 = 1, w01 = 0, w10 = 0, w11 = p - u;
  }
  auto apply = [&](FpVec2 c) -> FpVec2 {
    return {static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(w00) * c.a + static_cast<std::uint64_t>(w01) * c.b) % p),
            static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(w10) * c.a + static_cast<std::uint64_t>(w11) * c.b) % p)};
  };
  std::vector<FpVec2> t(cols.begin(), cols.end());
  for (auto& c : t) c = apply(c);
  for (std::size_t i = p; i < t.size(); ++i)
    if (t[i].a == 0 || t[i].b != 0)
      throw std::logic_error("basis change failed to send the tail to class (1:0)");

  // Zero the second coordinate using the first p columns, then cancel the
  // accumulated first coordinate with the tail's units.
  std::vector<std::uint32_t> bs;
  for (std::size_t i = 0; i < p; ++i) bs.push_back(t[i].b);
  auto head = solve_single_nontrivial(bs, p);
  std::uint32_t acc = 0;
  for (std::size_t i : head) acc = (acc + t[i].a) % p;

  std::vector<std::uint32_t> tail_as;
  for (std::size_t i = p; i < t.size(); ++i) tail_as.push_back(t[i].a);
  auto tail = solve_single_target(tail_as, (p - acc) % p, p);

  std::vector<std::size_t> sel = head;
  for (std::size_t i : tail) sel.push_back(p + i);

  std::uint32_t sa = 0, sb = 0;
  for (std::size_t i : sel) {
    sa = (sa + cols[i].a) % p;
    sb = (sb + cols[i].b) % p;
  }
  bool touches = !head.empty() && head.front() < p;
  if (sa != 0 || sb != 0 || !touches)
    throw std::logic_error("pair solution with class tail failed verification");
  return sel;
}

std::vector<std::size_t> solve_pair_constrained(std::span<const FpVec2> cols, std::uint32_t p) {
  if (cols.size() + 3 != 3 * static_cast<std::size_t>(p))
    throw std::invalid_argument("need exactly 3p-3 columns");
  for (const auto& c : cols)
    if ((c.a == 0 && c.b == 0) || c.a >= p || c.b >= p)
      throw std::invalid_argument("column is zero or not reduced mod p");

  std::size_t n = cols.size();
  std::uint32_t nsums = p * p;
  // can[i][s][need]: a subset of cols[i..) sums to s and, if need, contains
  // an index < p (so only positions i < p can discharge need).
  auto idx = [&](std::size_t i, std::uint32_t s, std::uint32_t need) {
    return (i * nsums + s) * 2 + need;
  };
  std::vector<std::uint8_t> can((n + 1) * nsums * 2, 0);
  can[idx(n, 0, 0)] = 1;
  for (std::size_t i = n; i-- > 0;) {
    std::uint32_t ca = cols[i].a, cb = cols[i].b;
    for (std::uint32_t s = 0; s < nsums; ++s) {
      std::uint32_t sa = s / p, sb = s % p;
      std::uint32_t prev = ((sa + p - ca) % p) * p + (sb + p - cb) % p;
      for (std::uint32_t need = 0; need < 2; ++need) {
        std::uint8_t ok = can[idx(i + 1, s, need)];
        if (!ok) {
          std::uint32_t need_after = (i < p) ? 0 : need;
          ok = can[idx(i + 1, prev, need_after)];
        }
        can[idx(i, s, need)] = ok;
      }
    }
  }
  if (!can[idx(0, 0, 1)])
    throw std::logic_error(
        "counterexample found: a 3p-3 column system with no constrained solution");

  std::vector<std::size_t> sel;
  std::uint32_t s = 0, need = 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t sa = s / p, sb = s % p;
    std::uint32_t prev = ((sa + p - cols[i].a) % p) * p + (sb + p - cols[i].b) % p;
    std::uint32_t need_after = (i < p) ? 0 : need;
    if (can[idx(i + 1, prev, need_after)]) {  // prefer including: lex-smallest S
      sel.push_back(i);
      s = prev;
      need = need_after;
    }
    if (s == 0 && need == 0) break;  // the prefix alone is already a solution
  }

  std::uint32_t sa = 0, sb = 0;
  bool touches = false;
  for (std::size_t i : sel) {
    sa = (sa + cols[i].a) % p;
    sb = (sb + cols[i].b) % p;
    touches = touches || i < p;
  }
  if (sel.empty() || sa != 0 || sb != 0 || !touches)
    throw std::logic_error("constrained pair solution failed verification");
  return sel;
}

std::optional<std::vector<std::size_t>> oracle_subset_solution(const model::System& sys) {
  const auto& ring = sys.ring();
  std::uint64_t p = ring.prime();
  unsigned t1 = sys.tau() + 1;
  u128 P128 = ring.pow_p(t1);

  // Rank states: 0 empty, 1+c rank one in class c (c in 0..p), p+2 rank two.
  std::uint64_t nrank = p + 3;
  u128 nstates128 = P128 * P128 * nrank;
  if (nstates128 > (u128{1} << 28) * 3)  // ~800M states would be ~3.2 GB
    throw std::invalid_argument("oracle state space exceeds the memory budget");
  std::uint64_t P = static_cast<std::uint64_t>(P128);
  std::uint64_t nstates = static_cast<std::uint64_t>(nstates128);
  if (sys.size() + 2 >= (std::uint64_t{1} << 32))
    throw std::invalid_argument("oracle limited to systems with < 2^32 columns");

  std::size_t s = sys.size();
  std::vector<std::uint32_t> ra(s), rb(s), cls(s);  // cls: p+1 marks "zero mod p"
  for (std::size_t i = 0; i < s; ++i) {
    const auto& c = sys.column(i);
    ra[i] = static_cast<std::uint32_t>(c.a % P128);
    rb[i] = static_cast<std::uint32_t>(c.b % P128);
    std::uint32_t ma = static_cast<std::uint32_t>(c.a % p), mb = static_cast<std::uint32_t>(c.b % p);
    cls[i] = (ma == 0 && mb == 0) ? static_cast<std::uint32_t>(p + 1)
                                  : class_of({ma, mb}, static_cast<std::uint32_t>(p));
  }

  auto rank_step = [&](std::uint64_t rank, std::uint32_t c) -> std::uint64_t {
    if (c == p + 1) return rank;            // column vanishes mod p
    if (rank == 0) return 1 + c;            // first class seen
    if (rank == p + 2) return rank;         // already rank two
    return rank == 1 + c ? rank : p + 2;    // same class keeps rank one
  };
  auto sidx = [&](std::uint64_t a, std::uint64_t b, std::uint64_t rank) {
    return (a * P + b) * nrank + rank;
  };

  // rr[state] = 1 + (least t such that a subset of the first t columns
  // reaches the state); 0 = unreached.  The empty subset gives rr = 1.
  std::vector<std::uint32_t> rr(nstates, 0);
  const std::uint64_t start = sidx(0, 0, 0);
  const std::uint64_t target = sidx(0, 0, p + 2);
  rr[start] = 1;
  std::vector<std::uint64_t> reached{start};

  std::size_t hit_at = s;  // first column index whose processing reaches the target
  for (std::size_t i = 0; i < s && hit_at == s; ++i) {
    std::size_t frontier = reached.size();  // states reachable within first i columns
    for (std::size_t r = 0; r < frontier; ++r) {
      std::uint64_t st = reached[r];
      std::uint64_t rank = st % nrank, rest = st / nrank;
      std::uint64_t b = rest % P, a = rest / P;
      std::uint64_t na = a + ra[i];
      if (na >= P) na -= P;
      std::uint64_t nb = b + rb[i];
      if (nb >= P) nb -= P;
      std::uint64_t nst = sidx(na, nb, rank_step(rank, cls[i]));
      if (rr[nst] == 0) {
        rr[nst] = static_cast<std::uint32_t>(i + 2);
        reached.push_back(nst);
        if (nst == target) {
          hit_at = i;
          break;
        }
      }
    }
  }
  if (rr[target] == 0) return std::nullopt;

  // Backward reconstruction: the state first reached at step t was created by
  // column t-1 from some state reachable within the first t-1 columns; among
  // valid predecessors pick the earliest-reachable one.  The witness is
  // deterministic and its largest index is the least possible over all
  // witnesses; later choices greedily minimize each next index, which need
  // not give the colexicographically smallest set when two predecessor
  // states tie on first reachability.
  std::vector<std::size_t> sel;
  std::uint64_t st = target;
  while (st != start) {
    std::uint32_t step = rr[st];
    if (step < 2) throw std::logic_error("oracle reconstruction reached an invalid state");
    std::size_t i = step - 2;
    std::uint64_t rank = st % nrank, rest = st / nrank;
    std::uint64_t b = rest % P, a = rest / P;
    std::uint64_t pa = (a + P - ra[i]) % P, pb = (b + P - rb[i]) % P;
    std::uint64_t best = nstates;
    for (std::uint64_t prank = 0; prank < nrank; ++prank) {
      if (rank_step(prank, cls[i]) != rank) continue;
      std::uint64_t cand = sidx(pa, pb, prank);
      if (rr[cand] == 0 || rr[cand] > step - 1) continue;
      if (best == nstates || rr[cand] < rr[best]) best = cand;
    }
    if (best == nstates) throw std::logic_error("oracle reconstruction found no predecessor");
    sel.push_back(i);
    st = best;
  }
  std::reverse(sel.begin(), sel.end());

  // Independent re-verification of the reconstructed witness.
  u128 sa = 0, sb = 0;
  std::uint64_t rank = 0;
  for (std::size_t i : sel) {
    sa = ring.add(sa, sys.column(i).a);
    sb = ring.add(sb, sys.column(i).b);
    rank = rank_step(rank, cls[i]);
  }
  if (sel.empty() || sa % P128 != 0 || sb % P128 != 0 || rank != p + 2)
    throw std::logic_error("oracle witness failed verification");
  return sel;
}

}  // namespace padsolve::congr
