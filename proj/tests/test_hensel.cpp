#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "padsolve/document.hpp"
#include "padsolve/hensel.hpp"
#include "padsolve/pipeline.hpp"
#include "padsolve/system.hpp"

using namespace padsolve;
using model::Column;
using model::System;
using pipeline::Certificate;

namespace {

System make(std::uint64_t p, unsigned tau, unsigned K, std::vector<Column> cols) {
  return System(padic::Ring(p, K), tau, std::move(cols));
}

// Independent residual: sum a_i x_i^d over the support, by plain powering.
std::pair<u128, u128> residual(const System& sys, const hensel::LiftedSolution& sol) {
  const auto& ring = sys.ring();
  u128 fa = 0, fb = 0;
  for (std::size_t j = 0; j < sol.support.size(); ++j) {
    u128 xd = ring.pow(sol.values[j], sys.degree());
    fa = ring.add(fa, ring.mul(sys.column(sol.support[j]).a, xd));
    fb = ring.add(fb, ring.mul(sys.column(sol.support[j]).b, xd));
  }
  return {fa, fb};
}

}  // namespace

TEST_CASE("lift raises a hand-built certificate digit by digit") {
  // p = 3, tau = 0, d = 2: support sums (3, 3) vanish mod 3 with rank 2.
  System sys = make(3, 0, 8, {{1, 1}, {1, 2}, {1, 0}, {5, 7}});
  Certificate cert{{0, 1, 2}, 3};
  REQUIRE(pipeline::verify(sys, cert));

  auto sol = hensel::lift(sys, cert, 8);
  CHECK(sol.support == cert.support);
  CHECK(sol.precision == 8);
  REQUIRE(sol.values.size() == 3);
  for (u128 v : sol.values) CHECK(sys.ring().is_unit(v));
  CHECK(hensel::check_solution(sys, sol));

  auto [fa, fb] = residual(sys, sol);
  CHECK(fa % sys.ring().pow_p(8) == 0);
  CHECK(fb % sys.ring().pow_p(8) == 0);

  // Stage log: one entry per gained digit, precisions strictly increasing,
  // residual valuations never below the certified precision.
  REQUIRE(sol.trace.size() == 7);  // tau + 1 = 1 up to 8
  unsigned expect = 2;
  for (const auto& st : sol.trace) {
    CHECK(st.precision == expect);
    CHECK(st.va >= st.precision);
    CHECK(st.vb >= st.precision);
    ++expect;
  }
}

TEST_CASE("lift at the base precision is the all-ones solution") {
  System sys = make(3, 0, 8, {{1, 1}, {1, 2}, {1, 0}, {5, 7}});
  Certificate cert{{0, 1, 2}, 3};
  auto sol = hensel::lift(sys, cert, 1);
  CHECK(sol.precision == 1);
  CHECK(sol.trace.empty());
  for (u128 v : sol.values) CHECK(v == 1);
  CHECK(hensel::check_solution(sys, sol));
}

TEST_CASE("lift validates its target range and its certificate") {
  System sys = make(3, 0, 8, {{1, 1}, {1, 2}, {1, 0}, {5, 7}});
  Certificate cert{{0, 1, 2}, 3};
  CHECK_THROWS_AS(hensel::lift(sys, cert, 0), std::invalid_argument);
  CHECK_THROWS_AS(hensel::lift(sys, cert, 9), std::invalid_argument);  // > K

  Certificate nonzero{{0, 1}, 3};  // sums (2, 3): a-sum not zero mod 3
  CHECK_THROWS_AS(hensel::lift(sys, nonzero, 8), std::invalid_argument);

  // Vanishing sums in a single class (1 : 1) are rank 1 and must be refused.
  System flat = make(3, 0, 8, {{1, 1}, {2, 2}, {1, 0}, {5, 7}});
  Certificate rank1{{0, 1}, 3};
  CHECK_THROWS_AS(hensel::lift(flat, rank1, 8), std::invalid_argument);
}

TEST_CASE("lift tracks a generated certificate through tau + 9 digits") {
  doc::GenOptions opt;
  opt.p = 5;
  opt.tau = 1;
  opt.s = 1541;
  opt.seed = 12;
  System sys = doc::to_system(doc::gen_random_system(opt));
  auto res = pipeline::solve(sys);
  REQUIRE(res.status == pipeline::SolveStatus::Certified);

  unsigned target = sys.ring().precision();  // tau + 9 by generator default
  CHECK(target == 10);
  auto sol = hensel::lift(sys, *res.certificate, target);
  CHECK(sol.precision == target);
  CHECK(hensel::check_solution(sys, sol));
  CHECK(sol.trace.size() == target - sys.tau() - 1);
  unsigned expect = sys.tau() + 2;
  for (const auto& st : sol.trace) {
    CHECK(st.precision == expect);
    CHECK(st.va >= st.precision);
    CHECK(st.vb >= st.precision);
    ++expect;
  }
  auto [fa, fb] = residual(sys, sol);
  CHECK(fa % sys.ring().pow_p(target) == 0);
  CHECK(fb % sys.ring().pow_p(target) == 0);
}

TEST_CASE("check_solution rejects malformed or broken solutions") {
  System sys = make(3, 0, 8, {{1, 1}, {1, 2}, {1, 0}, {5, 7}});
  Certificate cert{{0, 1, 2}, 3};
  auto sol = hensel::lift(sys, cert, 8);
  REQUIRE(hensel::check_solution(sys, sol));

  auto broken = sol;
  broken.values[0] = 0;  // removes one unit-power term from each sum
  CHECK_FALSE(hensel::check_solution(sys, broken));

  auto misaligned = sol;
  misaligned.values.pop_back();
  CHECK_FALSE(hensel::check_solution(sys, misaligned));

  auto unsorted = sol;
  std::swap(unsorted.support[0], unsorted.support[1]);
  std::swap(unsorted.values[0], unsorted.values[1]);
  CHECK_FALSE(hensel::check_solution(sys, unsorted));

  auto empty = sol;
  empty.support.clear();
  empty.values.clear();
  CHECK_FALSE(hensel::check_solution(sys, empty));

  auto overdeep = sol;
  overdeep.precision = 9;  // beyond K
  CHECK_FALSE(hensel::check_solution(sys, overdeep));
}
