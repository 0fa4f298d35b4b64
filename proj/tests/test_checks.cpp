#include <stdexcept>

#include "doctest.h"
#include "padsolve/checks.hpp"

using namespace padsolve;

// The acceptance binary runs these suites at full scale; here each one gets
// a quick seeded pass so a regression is caught in the unit cycle.

TEST_CASE("olson check suites pass") {
  auto rep = checks::check_olson_random(3, 2000, 1);
  CHECK(rep.ok());
  CHECK(rep.trials == 2000);
  CHECK(checks::check_olson_random(5, 500, 2).ok());
  CHECK_THROWS_AS(checks::check_olson_exhaustive(5), std::invalid_argument);
}

TEST_CASE("cauchy-davenport check suites pass") {
  CHECK(checks::check_cd_exhaustive(3).ok());
  CHECK(checks::check_cd_exhaustive(5).ok());
  CHECK(checks::check_cd_random(11, 1000, 3).ok());
  CHECK_THROWS_AS(checks::check_cd_exhaustive(11), std::invalid_argument);
}

TEST_CASE("constrained pair check suites pass") {
  CHECK(checks::check_prop71_random(3, 2000, 4).ok());
  CHECK(checks::check_prop71_random(5, 500, 5).ok());
}

TEST_CASE("contraction check runs at both constant regimes") {
  CHECK(checks::check_alon_random(3, 300, 6, false).ok());
  CHECK(checks::check_alon_random(5, 100, 7, false).ok());
  // The strict threshold needs 9996p vectors per trial; keep the count tiny.
  CHECK(checks::check_alon_random(3, 3, 8, true).ok());
}

TEST_CASE("davenport check suites pass") {
  CHECK(checks::check_davenport_exhaustive(3).ok());
  CHECK(checks::check_davenport_random(7, 2000, 9).ok());
  CHECK_THROWS_AS(checks::check_davenport_exhaustive(5), std::invalid_argument);
}

TEST_CASE("theta law holds on seeded moves") {
  auto rep = checks::check_theta_law(300, 10);
  CHECK(rep.ok());
  CHECK(rep.trials == 300);
}

TEST_CASE("oracle equivalence holds on seeded systems") {
  auto rep = checks::check_oracle_equivalence(300, 11);
  CHECK(rep.ok());
  CHECK(rep.detail.empty());
}
