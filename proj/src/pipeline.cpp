#include "padsolve/pipeline.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace padsolve::pipeline {

std::size_t Forest::add_leaf(std::size_t column) {
  if (column >= sys_->size()) throw std::out_of_range("leaf column out of range");
  if (leafed_[column]) throw std::logic_error("column already wrapped in a leaf");
  leafed_[column] = 1;
  VarNode nd;
  nd.id = nodes_.size();
  nd.level = sys_->level_of(column);
  nd.ca = sys_->column(column).a;
  nd.cb = sys_->column(column).b;
  nd.column = column;
  nodes_.push_back(std::move(nd));
  consumed_.push_back(0);
  return nodes_.back().id;
}

std::size_t Forest::contract(NodeKind kind, std::span<const std::size_t> children) {
  if (children.empty()) throw std::invalid_argument("contraction needs at least one child");
  const padic::Ring& ring = sys_->ring();
  u128 ca = 0, cb = 0;
  for (std::size_t c : children) {
    if (c >= nodes_.size()) throw std::out_of_range("child node id out of range");
    if (consumed_[c]) throw std::logic_error("node already consumed by another contraction");
    consumed_[c] = 1;
    ca = ring.add(ca, nodes_[c].ca);
    cb = ring.add(cb, nodes_[c].cb);
  }
  VarNode nd;
  nd.id = nodes_.size();
  nd.kind = kind;
  nd.level = std::min(ring.vord(ca), ring.vord(cb));
  nd.ca = ca;
  nd.cb = cb;
  nd.children.assign(children.begin(), children.end());
  nodes_.push_back(std::move(nd));
  consumed_.push_back(0);
  return nodes_.back().id;
}

std::vector<std::size_t> Forest::leaf_columns(std::size_t id) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{id};
  while (!stack.empty()) {
    const VarNode& nd = nodes_.at(stack.back());
    stack.pop_back();
    if (nd.column) out.push_back(*nd.column);
    for (std::size_t c : nd.children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::logic_error("contraction node with no leaves");
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw std::logic_error("duplicate column under a contraction node");
  return out;
}

void Forest::check_exact(std::size_t id) const {
  const padic::Ring& ring = sys_->ring();
  std::vector<std::size_t> stack{id};
  while (!stack.empty()) {
    const VarNode& nd = nodes_.at(stack.back());
    stack.pop_back();
    if (nd.column) {
      if (nd.ca != sys_->column(*nd.column).a || nd.cb != sys_->column(*nd.column).b)
        throw std::logic_error("leaf coefficients drifted from the source column");
    } else {
      u128 ca = 0, cb = 0;
      for (std::size_t c : nd.children) {
        ca = ring.add(ca, nodes_.at(c).ca);
        cb = ring.add(cb, nodes_.at(c).cb);
        stack.push_back(c);
      }
      if (ca != nd.ca || cb != nd.cb)
        throw std::logic_error("node coefficients are not the sum of the children");
    }
    if (nd.level != std::min(ring.vord(nd.ca), ring.vord(nd.cb)))
      throw std::logic_error("stored level disagrees with the coefficient valuations");
  }
}

namespace {

using model::System;
using zerosum::FpVec2;

// Removes the entries of v at the ascending positions pos.
template <class T>
void erase_positions(std::vector<T>& v, std::span<const std::size_t> pos) {
  std::vector<T> out;
  out.reserve(v.size() - pos.size());
  std::size_t pi = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (pi < pos.size() && pos[pi] == i) {
      ++pi;
      continue;
    }
    out.push_back(v[i]);
  }
  if (pi != pos.size()) throw std::logic_error("witness position out of range");
  v = std::move(out);
}

// Lexicographically smallest subset of cols with both coordinate sums zero
// mod p that meets at least two projective classes (cls[i] in 0..p), or
// nullopt.  Suffix-feasibility DP over (sum pair, class-diversity state);
// diversity states: 0 = none chosen, 1 + c = all chosen in class c,
// p + 2 = two classes seen.
std::optional<std::vector<std::size_t>> two_class_zero_sum(const std::vector<FpVec2>& cols,
                                                           const std::vector<std::uint32_t>& cls,
                                                           std::uint32_t p) {
  std::size_t n = cols.size();
  if (n == 0) return std::nullopt;
  const std::uint32_t nsums = p * p;
  const std::uint32_t mixed = p + 2;
  const std::uint32_t ndiv = p + 3;
  auto fold = [&](std::uint32_t div, std::uint32_t c) -> std::uint32_t {
    if (div == 0) return 1 + c;
    if (div == mixed || div == 1 + c) return div;
    return mixed;
  };
  auto idx = [&](std::size_t i, std::uint32_t s, std::uint32_t div) {
    return (i * nsums + s) * ndiv + div;
  };
  // can[i][s][div]: some subset of cols[i..) sums to s and drives div to mixed
  std::vector<std::uint8_t> can((n + 1) * nsums * ndiv, 0);
  for (std::uint32_t div = 0; div < ndiv; ++div) can[idx(n, 0, div)] = (div == mixed);
  for (std::size_t i = n; i-- > 0;) {
    for (std::uint32_t s = 0; s < nsums; ++s) {
      std::uint32_t prev = ((s / p + p - cols[i].a) % p) * p + (s % p + p - cols[i].b) % p;
      for (std::uint32_t div = 0; div < ndiv; ++div) {
        std::uint8_t ok = can[idx(i + 1, s, div)];
        if (!ok) ok = can[idx(i + 1, prev, fold(div, cls[i]))];
        can[idx(i, s, div)] = ok;
      }
    }
  }
  if (!can[idx(0, 0, 0)]) return std::nullopt;
  std::vector<std::size_t> sel;
  std::uint32_t s = 0, div = 0;  // s = remaining sum still needed
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t prev = ((s / p + p - cols[i].a) % p) * p + (s % p + p - cols[i].b) % p;
    std::uint32_t ndv = fold(div, cls[i]);
    if (can[idx(i + 1, prev, ndv)]) {
      sel.push_back(i);
      s = prev;
      div = ndv;
      if (s == 0 && div == mixed) break;
    }
  }
  if (s != 0 || div != mixed) throw std::logic_error("two-class zero-sum reconstruction failed");
  return sel;
}

class Engine {
 public:
  Engine(const System& sys, const SolveOptions& opts)
      : sys_(sys), ring_(sys.ring()), opts_(opts), forest_(sys) {
    p64_ = ring_.prime();
    p_ = static_cast<std::uint32_t>(p64_);
    tau_ = sys.tau();
    K_ = ring_.precision();
    T_ = ring_.pow_p(tau_ + 1);
    ptau_ = static_cast<std::size_t>(ring_.pow_p(tau_));
  }

  SolveResult run() {
    for (std::size_t i = 0; i < sys_.size(); ++i)
      if (sys_.column(i).a == 0 && sys_.column(i).b == 0)
        return finish(SolveStatus::Rejected,
                      "column " + std::to_string(i) + " vanishes mod p^K");
    if (opts_.mode == SolveMode::Guaranteed) {
      std::string why;
      if (!case_bound_ok(&why))
        return finish(SolveStatus::Rejected, "theorem-case precondition: " + why);
      if (!model::check_level_bounds(sys_, &why))
        return finish(SolveStatus::Rejected, "system is not normalized: " + why);
    }

    by_level_.assign(tau_ + 2, {});
    for (std::size_t i = 0; i < sys_.size(); ++i)
      by_level_[std::min<unsigned>(sys_.level_of(i), tau_ + 1)].push_back(i);
    reserved_.assign(sys_.size(), 0);
    for (std::size_t c : by_level_[tau_ + 1]) reserved_[c] = 1;
    if (!by_level_[tau_ + 1].empty())
      note(std::to_string(by_level_[tau_ + 1].size()) +
           " columns above level tau are set aside");
    cursor_.assign(tau_ + 1, 0);
    prim_.assign(tau_ + 2, {});
    step_.assign(tau_ + 1, {});
    spool_.assign(tau_ + 1, {});

    std::vector<std::size_t> H;
    if (!stage_select_h(H)) return stage_failed();
    if (!stage_primaries(std::move(H))) return stage_failed();
    if (result_) return certified();
    if (tau_ >= 2) {
      if (!stage_stepstones()) return stage_failed();
      if (!stage_raise()) return stage_failed();
      if (result_) return certified();
    } else if (prim_[tau_].size() < p_) {
      fail_ = "only " + std::to_string(prim_[tau_].size()) +
              " primaries at level tau, need p = " + std::to_string(p_);
      return stage_failed();
    }
    std::vector<std::size_t> secs;
    if (!stage_secondaries(secs)) return stage_failed();
    if (!stage_final(secs)) return stage_failed();
    return certified();
  }

 private:
  // ----- bookkeeping -------------------------------------------------------

  void note(std::string s) { log_.notes.push_back(std::move(s)); }

  SolveResult finish(SolveStatus st, std::string diag,
                     std::optional<Certificate> cert = std::nullopt) {
    SolveResult res;
    res.status = st;
    res.certificate = std::move(cert);
    res.diagnostic = std::move(diag);
    res.log = std::move(log_);
    return res;
  }

  SolveResult certified() {
    if (!result_) throw std::logic_error("certified without a certificate");
    return finish(SolveStatus::Certified, "", std::move(result_));
  }

  SolveResult stage_failed() {
    if (opts_.mode == SolveMode::Opportunistic && opts_.allow_oracle_fallback) return fallback();
    return finish(SolveStatus::PipelineFailure, fail_);
  }

  SolveResult fallback() {
    note("pipeline stage failed: " + fail_);
    note("falling back to the subset oracle");
    try {
      auto sol = congr::oracle_subset_solution(sys_);
      if (sol) {
        Certificate cert{std::move(*sol), T_};
        if (!verify(sys_, cert)) throw std::logic_error("oracle certificate failed verification");
        return finish(SolveStatus::Certified, "", std::move(cert));
      }
      return finish(SolveStatus::Unsolvable,
                    "no nonempty rank-2 subset solves the pair mod p^(tau+1); "
                    "pipeline diagnostic: " +
                        fail_);
    } catch (const std::invalid_argument& e) {
      return finish(SolveStatus::PipelineFailure,
                    fail_ + "; oracle unavailable: " + e.what());
    }
  }

  // Exact integer forms of the theorem cases' preconditions.
  bool case_bound_ok(std::string* why) const {
    u128 d = sys_.degree();
    u128 s = sys_.size();
    if (d > (u128{1} << 40)) {
      *why = "degree too large for exact bound evaluation";
      return false;
    }
    if (tau_ == 0) {
      *why = "no covered case for tau = 0";
      return false;
    }
    if (tau_ >= 2) {
      // s > 2(p/(p-1))d^2 - 2d  <=>  (s + 2d)(p - 1) > 2 p d^2
      if (tau_ >= 3 && p64_ < 7) {
        *why = "tau >= 3 requires p >= 7";
        return false;
      }
      if (!((s + 2 * d) * (p64_ - 1) > 2 * u128{p64_} * d * d)) {
        *why = "size bound (s + 2d)(p - 1) > 2 p d^2 fails";
        return false;
      }
      return true;
    }
    if (p64_ < 5) {
      *why = "tau = 1 requires p >= 5";
      return false;
    }
    if (opts_.strict_constants) {
      // s > (2p/(p-1) + (C - 3)/(2p - 2)) d^2 - 2d with C = 9996
      // <=>  2(p - 1)s + 4d(p - 1) > (4p + 9993) d^2
      if (!(2 * (p64_ - 1) * s + 4 * d * (p64_ - 1) >
            (4 * u128{p64_} + zerosum::kAlonConstant - 3) * d * d)) {
        *why = "size bound 2(p - 1)s + 4d(p - 1) > (4p + 9993) d^2 fails";
        return false;
      }
      return true;
    }
    // Same bound with the effective constant C = (3p^2 - 2)/p:
    // 2p(p - 1)s + 4dp(p - 1) > (7p^2 - 3p - 2) d^2
    u128 P = p64_;
    if (!(2 * P * (P - 1) * s + 4 * d * P * (P - 1) > (7 * P * P - 3 * P - 2) * d * d)) {
      *why = "size bound 2p(p - 1)s + 4dp(p - 1) > (7p^2 - 3p - 2) d^2 fails";
      return false;
    }
    return true;
  }

  // ----- node views --------------------------------------------------------

  FpVec2 node_vec(std::size_t id, unsigned l) const {
    const VarNode& nd = forest_.node(id);
    if (nd.level != l) throw std::logic_error("node presented at the wrong level");
    u128 pe = ring_.pow_p(l);
    return {static_cast<std::uint32_t>(nd.ca / pe % p_),
            static_cast<std::uint32_t>(nd.cb / pe % p_)};
  }

  zerosum::PrimitiveVec node_prim(std::size_t id, unsigned l) const {
    const VarNode& nd = forest_.node(id);
    if (nd.level != l) throw std::logic_error("node presented at the wrong level");
    u128 pe = ring_.pow_p(l);
    return {nd.ca / pe, nd.cb / pe};
  }

  std::size_t contract_record(const char* stage, NodeKind kind, unsigned level_from,
                              std::vector<std::size_t> children,
                              std::vector<std::size_t> witness) {
    std::size_t id = forest_.contract(kind, children);
    const VarNode& nd = forest_.node(id);
    ContractionRecord rec;
    rec.stage = stage;
    rec.kind = kind == NodeKind::Primary ? "primary" : "secondary";
    rec.level_from = level_from;
    rec.level_to = nd.level;
    rec.inputs = std::move(children);
    rec.witness = std::move(witness);
    rec.va = ring_.vord(nd.ca);
    rec.vb = ring_.vord(nd.cb);
    rec.node = id;
    log_.contractions.push_back(std::move(rec));
    if (kind == NodeKind::Primary && nd.level >= tau_ + 1 && !result_) {
      forest_.check_exact(id);
      Certificate cert{forest_.leaf_columns(id), T_};
      if (!verify(sys_, cert))
        throw std::logic_error("short-circuit certificate failed verification");
      note("short-circuit: primary node " + std::to_string(id) + " reached level " +
           std::to_string(nd.level) + " >= tau + 1");
      result_ = std::move(cert);
    }
    return id;
  }

  void place_primary(std::size_t id) {
    if (result_) return;
    const VarNode& nd = forest_.node(id);
    if (nd.level < 1 || nd.level > tau_)
      throw std::logic_error("primary node at an impossible level");
    prim_[nd.level].push_back(id);
  }

  // ----- stages ------------------------------------------------------------

  bool stage_select_h(std::vector<std::size_t>& H) {
    auto sel = model::select_H(sys_);
    if (!sel.diagnostic.empty()) {
      fail_ = sel.diagnostic;
      return false;
    }
    for (std::size_t i : sel.H) reserved_[i] = 1;
    note("select_H: |H| = " + std::to_string(sel.H.size()) +
         ", q(H) = " + std::to_string(sel.q) + ", threshold p^(tau+1) = " + u128_to_string(T_));
    H = std::move(sel.H);
    return true;
  }

  // Contracts H into p^tau primary variables, each the sum of at most 2p
  // level-0 columns meeting two projective classes (so the eventual support
  // has rank 2 mod p).  H splits once into its largest projective class and
  // the rest; each round presents the p lowest-index remaining columns from
  // each side.  Such a pool always contains a two-class zero-sum: some
  // nonempty subset of the p far-side columns sums to a multiple of the
  // near-side class (Davenport constant of Z/p), and the subset sums of p
  // unit scalars on the near side cover every residue needed to cancel it.
  // Each round consumes at most p columns per side, so sides of p^(tau+1)
  // survive all p^tau rounds.  If a side still runs dry (only possible when
  // the largest class held fewer than p^(tau+1) columns), the split is redone
  // around the current largest class, and as a last resort the whole
  // remainder is searched before giving up.
  bool stage_primaries(std::vector<std::size_t> rem) {
    auto col_vec = [&](std::size_t col) {
      const model::Column& c = sys_.column(col);
      return FpVec2{static_cast<std::uint32_t>(c.a % p_),
                    static_cast<std::uint32_t>(c.b % p_)};
    };
    auto largest_class = [&](const std::vector<std::size_t>& cols) {
      std::vector<std::size_t> count(p_ + 1, 0);
      for (std::size_t c : cols) ++count[sys_.proj_class(c)];
      std::uint32_t big = 0;
      for (std::uint32_t c = 1; c <= p_; ++c)
        if (count[c] > count[big]) big = c;
      return big;
    };
    auto split = [&](const std::vector<std::size_t>& cols, std::vector<std::size_t> side[2]) {
      std::uint32_t big = largest_class(cols);
      side[0].clear();
      side[1].clear();
      for (std::size_t c : cols) side[sys_.proj_class(c) != big].push_back(c);
    };
    std::vector<std::size_t> side[2];  // [0] = largest class of H, [1] = the rest
    split(rem, side);

    std::size_t made = 0;
    while (made < ptau_ && !result_) {
      if (side[0].size() < p_ || side[1].size() < p_) {
        std::vector<std::size_t> left;
        std::merge(side[0].begin(), side[0].end(), side[1].begin(), side[1].end(),
                   std::back_inserter(left));
        split(left, side);
      }
      std::vector<std::size_t> pool;  // column indices, ascending
      if (side[0].size() >= p_ && side[1].size() >= p_) {
        pool.insert(pool.end(), side[0].begin(), side[0].begin() + p_);
        pool.insert(pool.end(), side[1].begin(), side[1].begin() + p_);
        std::sort(pool.begin(), pool.end());
      } else {
        std::merge(side[0].begin(), side[0].end(), side[1].begin(), side[1].end(),
                   std::back_inserter(pool));
        note("primaries: round " + std::to_string(made) + " searched all " +
             std::to_string(pool.size()) + " remaining H-columns");
      }
      std::vector<FpVec2> pv;
      std::vector<std::uint32_t> pc;
      for (std::size_t col : pool) {
        pv.push_back(col_vec(col));
        pc.push_back(sys_.proj_class(col));
      }
      auto w = two_class_zero_sum(pv, pc, p_);
      if (!w) {
        fail_ = "primaries: no two-class zero-sum subset among the remaining " +
                std::to_string(pool.size()) + " H-columns after " + std::to_string(made) +
                " of " + std::to_string(ptau_);
        return false;
      }
      std::vector<std::size_t> chosen;  // column indices, ascending because pool is
      chosen.reserve(w->size());
      for (std::size_t j : *w) chosen.push_back(pool[j]);
      std::vector<std::size_t> kids;
      kids.reserve(chosen.size());
      for (std::size_t col : chosen) kids.push_back(forest_.add_leaf(col));
      place_primary(contract_record("primaries", NodeKind::Primary, 0, kids, *w));
      for (auto& s : side) {
        std::vector<std::size_t> keep;
        std::set_difference(s.begin(), s.end(), chosen.begin(), chosen.end(),
                            std::back_inserter(keep));
        s = std::move(keep);
      }
      ++made;
    }
    if (!result_)
      note("primaries: built " + std::to_string(made) + " two-class primaries, " +
           std::to_string(side[0].size() + side[1].size()) + " H-columns unused");
    return true;
  }

  // Reserves the 7p^tau lowest-index unreserved columns at levels 0..1 and
  // cascades level-l pools into level l+1 while a pigeonhole contraction is
  // guaranteed (3p^2 - 2 inputs, at most p consumed), for l = 0..tau-2.
  bool stage_stepstones() {
    u128 want128 = u128{7} * ring_.pow_p(tau_);
    std::size_t want = static_cast<std::size_t>(want128);
    std::vector<std::size_t> src;
    src.reserve(want);
    const auto& l0 = by_level_[0];
    const auto& l1 = by_level_[1];
    std::size_t i = 0, j = 0;
    while (src.size() < want && (i < l0.size() || j < l1.size())) {
      std::size_t pick =
          (j >= l1.size() || (i < l0.size() && l0[i] < l1[j])) ? l0[i++] : l1[j++];
      if (!reserved_[pick]) src.push_back(pick);
    }
    if (src.size() < want) {
      std::string msg = "stepstones: only " + std::to_string(src.size()) +
                        " unreserved columns at levels 0..1 of " + std::to_string(want) +
                        " requested";
      if (opts_.mode == SolveMode::Guaranteed) {
        fail_ = msg;
        return false;
      }
      note(msg);
    }
    for (std::size_t c : src) {
      reserved_[c] = 1;
      std::size_t id = forest_.add_leaf(c);
      step_[forest_.node(id).level].push_back(id);
    }
    note("stepstones: reserved " + std::to_string(src.size()) + " columns at levels 0..1");
    const std::size_t lift_need = 3 * static_cast<std::size_t>(p_) * p_ - 2;
    for (unsigned l = 0; l + 1 < tau_; ++l) {
      while (step_[l].size() >= lift_need) {
        std::vector<zerosum::PrimitiveVec> pv;
        pv.reserve(step_[l].size());
        for (std::size_t id : step_[l]) pv.push_back(node_prim(id, l));
        auto w = zerosum::lift_contraction(pv, ring_);
        std::vector<std::size_t> kids;
        for (std::size_t x : w) kids.push_back(step_[l][x]);
        std::size_t id = contract_record("stepstones", NodeKind::Secondary, l, kids, w);
        if (forest_.node(id).level != l + 1)
          throw std::logic_error("stepstone contraction missed the next level");
        step_[l + 1].push_back(id);
        erase_positions(step_[l], w);
      }
    }
    std::string shortfall;
    for (unsigned l = 1; l + 1 < tau_ && shortfall.empty(); ++l) {
      std::size_t floor = 3 * static_cast<std::size_t>(p_) * p_ - p_ - 2;
      if (step_[l].size() < floor)
        shortfall = "stepstones: level " + std::to_string(l) + " holds " +
                    std::to_string(step_[l].size()) + " nodes, below the 3p^2 - p - 2 floor";
    }
    if (shortfall.empty() && step_[tau_ - 1].size() < 4 * static_cast<std::size_t>(p_) - 6)
      shortfall = "stepstones: level " + std::to_string(tau_ - 1) + " holds " +
                  std::to_string(step_[tau_ - 1].size()) + " nodes, below the 4p - 6 floor";
    if (!shortfall.empty()) {
      if (opts_.mode == SolveMode::Guaranteed) {
        fail_ = shortfall;
        return false;
      }
      note(shortfall);
    }
    return true;
  }

  // Raises primaries level by level: Olson zero-sums while at least 3p - 2
  // are present, then up to min(2, floor(x / p)) assisted contractions that
  // present exactly p primaries next to stepstone secondaries (same-class
  // tail below tau - 1, constrained pair solver at tau - 1).
  bool stage_raise() {
    const std::size_t olson_need = 3 * static_cast<std::size_t>(p_) - 2;
    for (unsigned l = 1; l < tau_ && !result_; ++l) {
      auto& P = prim_[l];
      while (P.size() >= olson_need && !result_) {
        std::vector<FpVec2> vs;
        vs.reserve(P.size());
        for (std::size_t id : P) vs.push_back(node_vec(id, l));
        auto w = zerosum::olson_zero_sum(vs, p_);
        std::vector<std::size_t> kids;
        for (std::size_t x : w) kids.push_back(P[x]);
        std::size_t id = contract_record("raise", NodeKind::Primary, l, kids, w);
        erase_positions(P, w);
        place_primary(id);
      }
      if (result_) return true;
      std::size_t assists = std::min<std::size_t>(2, P.size() / p_);
      for (std::size_t k = 0; k < assists && !result_; ++k) {
        if (P.size() < p_) break;
        bool ok = (l + 1 < tau_) ? assist_class_tail(l, P) : assist_constrained(l, P);
        if (!ok) {
          note("raise: assist unavailable at level " + std::to_string(l));
          break;
        }
      }
      if (!result_ && !P.empty())
        note("raise: " + std::to_string(P.size()) + " primaries stranded at level " +
             std::to_string(l));
    }
    if (result_) return true;
    if (prim_[tau_].size() < p_) {
      fail_ = "raise: " + std::to_string(prim_[tau_].size()) +
              " primaries reached level tau, need p = " + std::to_string(p_);
      return false;
    }
    note("raise: " + std::to_string(prim_[tau_].size()) + " primaries at level tau");
    return true;
  }

  bool assist_class_tail(unsigned l, std::vector<std::size_t>& P) {
    auto& pool = step_[l];
    std::vector<std::vector<std::size_t>> byclass(p_ + 1);
    for (std::size_t pos = 0; pos < pool.size(); ++pos) {
      const VarNode& nd = forest_.node(pool[pos]);
      byclass[model::proj_class_of(nd.ca, nd.cb, ring_, l)].push_back(pos);
    }
    std::size_t cls = p_ + 1;
    for (std::uint32_t c = 0; c <= p_ && cls > p_; ++c)
      if (byclass[c].size() + 1 >= p_) cls = c;
    if (cls > p_) return false;
    std::vector<std::size_t> heads(P.begin(), P.begin() + p_);
    std::vector<std::size_t> tail(byclass[cls].begin(), byclass[cls].begin() + (p_ - 1));
    std::vector<FpVec2> cols;
    cols.reserve(2 * static_cast<std::size_t>(p_) - 1);
    for (std::size_t id : heads) cols.push_back(node_vec(id, l));
    for (std::size_t pos : tail) cols.push_back(node_vec(pool[pos], l));
    auto S = congr::solve_pair_class_tail(cols, p_);
    apply_assist("raise", l, S, heads, tail, P, pool);
    return true;
  }

  bool assist_constrained(unsigned l, std::vector<std::size_t>& P) {
    auto& pool = step_[l];
    const std::size_t tail_need = 2 * static_cast<std::size_t>(p_) - 3;
    if (pool.size() < tail_need) return false;
    std::vector<std::size_t> heads(P.begin(), P.begin() + p_);
    std::vector<std::size_t> tail(tail_need);
    for (std::size_t j = 0; j < tail_need; ++j) tail[j] = j;
    std::vector<FpVec2> cols;
    cols.reserve(p_ + tail_need);
    for (std::size_t id : heads) cols.push_back(node_vec(id, l));
    for (std::size_t pos : tail) cols.push_back(node_vec(pool[pos], l));
    auto S = congr::solve_pair_constrained(cols, p_);
    apply_assist("raise", l, S, heads, tail, P, pool);
    return true;
  }

  // Maps a witness over [heads | tail-of-pool] back to node ids, contracts,
  // and removes the consumed entries from both source lists.
  void apply_assist(const char* stage, unsigned l, const std::vector<std::size_t>& S,
                    const std::vector<std::size_t>& heads, const std::vector<std::size_t>& tail,
                    std::vector<std::size_t>& P, std::vector<std::size_t>& pool) {
    std::vector<std::size_t> kids, ppos, spos;
    for (std::size_t j : S) {
      if (j < p_) {
        kids.push_back(heads[j]);
        ppos.push_back(j);
      } else {
        kids.push_back(pool[tail[j - p_]]);
        spos.push_back(tail[j - p_]);
      }
    }
    std::size_t id = contract_record(stage, NodeKind::Primary, l, kids, S);
    erase_positions(P, ppos);
    std::sort(spos.begin(), spos.end());
    erase_positions(pool, spos);
    place_primary(id);
  }

  // Produces 2p - 3 secondaries at level exactly tau after checking the
  // theorem case's census of unreserved columns.  Free pulls of level-tau
  // columns come first; deeper demand cascades fresh pools upward, one
  // contraction per produced node.
  bool stage_secondaries(std::vector<std::size_t>& secs) {
    const char* cname = tau_ >= 3 ? "(i)" : tau_ == 2 ? "(ii)" : "(iii)";
    std::size_t avail = 0;
    for (unsigned l = 0; l <= tau_; ++l)
      for (std::size_t c : by_level_[l]) avail += reserved_[c] ? 0 : 1;
    u128 need = 0;
    if (tau_ >= 3)
      need = u128{6} * ring_.pow_p(tau_ + 1) - u128{8} * ring_.pow_p(tau_);
    else if (tau_ == 2)
      need = u128{4} * ring_.pow_p(3) - u128{8} * ring_.pow_p(2);
    else if (opts_.strict_constants)
      need = 2 * u128{p64_} * p64_ + u128{zerosum::kAlonConstant - 3} * p64_ - 3;
    else
      need = 5 * u128{p64_} * p64_ - 3 * u128{p64_} - 5;
    note("secondaries: case " + std::string(cname) + ", " + std::to_string(avail) +
         " unreserved columns at levels 0..tau, census floor " + u128_to_string(need));
    if (u128{avail} < need) {
      std::string msg = "secondaries: census shortfall for case " + std::string(cname) + ": " +
                        std::to_string(avail) + " available, floor " + u128_to_string(need);
      if (opts_.mode == SolveMode::Guaranteed) {
        fail_ = msg;
        return false;
      }
      note(msg);
    }
    const std::size_t want = 2 * static_cast<std::size_t>(p_) - 3;
    secs.clear();
    while (secs.size() < want) {
      auto id = produce_secondary(tau_);
      if (!id) break;
      secs.push_back(*id);
    }
    if (secs.size() < want) {
      fail_ = "secondaries: produced " + std::to_string(secs.size()) + " of " +
              std::to_string(want) + " level-tau secondaries before running dry";
      return false;
    }
    note("secondaries: " + std::to_string(secs.size()) + " nodes at level tau");
    return true;
  }

  std::optional<std::size_t> produce_secondary(unsigned l) {
    if (auto id = pull_column(l)) return id;
    if (l == 0) return std::nullopt;
    unsigned src = l - 1;
    bool use_lift = tau_ >= 3;
    std::size_t need =
        use_lift ? 3 * static_cast<std::size_t>(p_) * p_ - 2
                 : static_cast<std::size_t>(
                       zerosum::contraction_threshold(p64_, opts_.strict_constants));
    while (spool_[src].size() < need) {
      auto child = produce_secondary(src);
      if (!child) return std::nullopt;
      spool_[src].push_back(*child);
    }
    std::vector<zerosum::PrimitiveVec> pv;
    pv.reserve(spool_[src].size());
    for (std::size_t id : spool_[src]) pv.push_back(node_prim(id, src));
    std::vector<std::size_t> w;
    if (use_lift) {
      w = zerosum::lift_contraction(pv, ring_);
    } else {
      auto res = zerosum::alon_lift_contraction(pv, ring_, opts_.strict_constants);
      if (!res.witness) return std::nullopt;
      w = std::move(*res.witness);
    }
    std::vector<std::size_t> kids;
    for (std::size_t x : w) kids.push_back(spool_[src][x]);
    std::size_t id = contract_record("secondaries", NodeKind::Secondary, src, kids, w);
    if (forest_.node(id).level != l)
      throw std::logic_error("secondary contraction missed the next level");
    erase_positions(spool_[src], w);
    return id;
  }

  std::optional<std::size_t> pull_column(unsigned l) {
    const auto& list = by_level_[l];
    std::size_t& cur = cursor_[l];
    while (cur < list.size() && reserved_[list[cur]]) ++cur;
    if (cur == list.size()) return std::nullopt;
    std::size_t col = list[cur++];
    reserved_[col] = 1;
    return forest_.add_leaf(col);
  }

  // Presents the first p level-tau primaries and the 2p - 3 secondaries to
  // the constrained pair solver; the combined node sums to zero mod p^{tau+1}
  // and its leaf set is the certificate support.
  bool stage_final(const std::vector<std::size_t>& secs) {
    auto& P = prim_[tau_];
    const std::size_t tail_need = 2 * static_cast<std::size_t>(p_) - 3;
    if (P.size() < p_ || secs.size() < tail_need)
      throw std::logic_error("final stage entered without its census");
    std::vector<std::size_t> heads(P.begin(), P.begin() + p_);
    std::vector<FpVec2> cols;
    cols.reserve(p_ + tail_need);
    for (std::size_t id : heads) cols.push_back(node_vec(id, tau_));
    for (std::size_t j = 0; j < tail_need; ++j) cols.push_back(node_vec(secs[j], tau_));
    auto S = congr::solve_pair_constrained(cols, p_);
    std::vector<std::size_t> kids;
    for (std::size_t j : S) kids.push_back(j < p_ ? heads[j] : secs[j - p_]);
    contract_record("final", NodeKind::Primary, tau_, kids, S);
    if (!result_) throw std::logic_error("final combination failed to clear level tau");
    return true;
  }

  // ----- state -------------------------------------------------------------

  const System& sys_;
  const padic::Ring& ring_;
  SolveOptions opts_;
  Forest forest_;
  RunLog log_;
  std::uint64_t p64_ = 0;
  std::uint32_t p_ = 0;
  unsigned tau_ = 0, K_ = 0;
  u128 T_ = 0;
  std::size_t ptau_ = 0;
  std::vector<std::uint8_t> reserved_;
  std::vector<std::vector<std::size_t>> by_level_;  // original columns, levels 0..tau + overflow
  std::vector<std::size_t> cursor_;                 // per-level free-pull position
  std::vector<std::vector<std::size_t>> prim_;      // primary node ids by exact level
  std::vector<std::vector<std::size_t>> step_;      // stepstone secondary node ids by level
  std::vector<std::vector<std::size_t>> spool_;     // cascade pools for stage_secondaries
  std::optional<Certificate> result_;
  std::string fail_;
};

}  // namespace

SolveResult solve(const model::System& sys, const SolveOptions& opts) {
  SolveResult res;
  if (sys.ring().prime() >= (std::uint64_t{1} << 20)) {
    res.status = SolveStatus::Rejected;
    res.diagnostic = "pipeline supports p < 2^20";
    return res;
  }
  if (sys.ring().pow_p(sys.tau()) > (u128{1} << 31)) {
    res.status = SolveStatus::Rejected;
    res.diagnostic = "p^tau exceeds the pipeline's materialization limit";
    return res;
  }
  Engine eng(sys, opts);
  return eng.run();
}

bool verify(const model::System& sys, const Certificate& cert) {
  const padic::Ring& ring = sys.ring();
  if (cert.modulus != ring.pow_p(sys.tau() + 1)) return false;
  if (cert.support.empty()) return false;
  for (std::size_t i = 0; i < cert.support.size(); ++i) {
    if (cert.support[i] >= sys.size()) return false;
    if (i > 0 && cert.support[i] <= cert.support[i - 1]) return false;
  }
  u128 P = ring.prime();
  u128 sa = 0, sb = 0;
  bool rank2 = false;
  std::optional<std::uint32_t> cls;
  for (std::size_t i : cert.support) {
    u128 a = sys.column(i).a, b = sys.column(i).b;
    sa = ring.add(sa, a);
    sb = ring.add(sb, b);
    if (a % P != 0 || b % P != 0) {
      std::uint32_t c = model::proj_class_of(a, b, ring, 0);
      if (!cls)
        cls = c;
      else if (*cls != c)
        rank2 = true;
    }
  }
  return rank2 && sa % cert.modulus == 0 && sb % cert.modulus == 0;
}

}  // namespace padsolve::pipeline
