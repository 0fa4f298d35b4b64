#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "padsolve/document.hpp"
#include "padsolve/system.hpp"

using namespace padsolve;

TEST_CASE("system documents round-trip bit-exactly") {
  doc::SystemDocument d;
  d.p = 5;
  d.tau = 1;
  d.precision = 4;
  d.columns = {{1, 2}, {624, 0}, {0, 333}};
  d.metadata = {{"generator", "padsolve gen"}, {"note", "round trip with spaces"}};
  CHECK(doc::parse_system(doc::emit_system(d)) == d);

  doc::SystemDocument bare;
  bare.p = 3;
  bare.tau = 1;
  bare.precision = 3;
  bare.columns = {{26, 25}};
  CHECK(doc::parse_system(doc::emit_system(bare)) == bare);
}

TEST_CASE("parser enforces the documented grammar") {
  CHECK_NOTHROW(doc::parse_system("3 1 3 1\n1 2\n"));
  // Metadata before the header only.
  CHECK_NOTHROW(doc::parse_system("# k v\n3 1 3 1\n1 2\n"));
  CHECK_THROWS_AS(doc::parse_system("3 1 3 1\n# k v\n1 2\n"), std::invalid_argument);
  // Header arity and value checks.
  CHECK_THROWS_AS(doc::parse_system(""), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_system("3 1 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_system("4 1 3 1\n1 2\n"), std::invalid_argument);   // p not prime
  CHECK_THROWS_AS(doc::parse_system("3 1 2 1\n1 2\n"), std::invalid_argument);   // K < tau + 2
  CHECK_THROWS_AS(doc::parse_system("3 1 3 0\n"), std::invalid_argument);        // s = 0
  // Column lines: exactly two reduced values, exactly s of them.
  CHECK_THROWS_AS(doc::parse_system("3 1 3 1\n1\n"), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_system("3 1 3 1\n1 2 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_system("3 1 3 1\n27 0\n"), std::invalid_argument);  // not reduced
  CHECK_THROWS_AS(doc::parse_system("3 1 3 2\n1 2\n"), std::invalid_argument);   // missing line
  CHECK_THROWS_AS(doc::parse_system("3 1 3 1\n1 2\n3 4\n"), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_system("3 1 3 1\n1 x\n"), std::invalid_argument);
}

TEST_CASE("documents convert to systems and back") {
  doc::SystemDocument d;
  d.p = 3;
  d.tau = 1;
  d.precision = 4;
  d.columns = {{1, 2}, {3, 9}, {80, 0}};
  model::System sys = doc::to_system(d);
  CHECK(sys.ring().prime() == 3);
  CHECK(sys.ring().precision() == 4);
  CHECK(sys.tau() == 1);
  REQUIRE(sys.size() == 3);
  CHECK(sys.column(1) == model::Column{3, 9});

  doc::SystemDocument back = doc::from_system(sys);
  CHECK(back.p == d.p);
  CHECK(back.tau == d.tau);
  CHECK(back.precision == d.precision);
  CHECK(back.columns == d.columns);
}

TEST_CASE("certificates round-trip and reject disorder") {
  std::vector<std::size_t> sup{0, 4, 17, 123456};
  CHECK(doc::parse_certificate(doc::emit_certificate(sup)) == sup);
  CHECK_THROWS_AS(doc::parse_certificate(""), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_certificate("3\n3\n"), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_certificate("5\n2\n"), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_certificate("1 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(doc::parse_certificate("x\n"), std::invalid_argument);
}

TEST_CASE("file helpers rethrow with the path attached") {
  CHECK_THROWS_AS(doc::read_system_file("/nonexistent/x.system"), std::runtime_error);
  CHECK_THROWS_AS(doc::read_certificate_file("/nonexistent/x.cert"), std::runtime_error);
}

TEST_CASE("generation is deterministic per seed") {
  doc::GenOptions opt;
  opt.p = 7;
  opt.tau = 1;
  opt.s = 50;
  opt.seed = 99;
  auto a = doc::gen_random_system(opt);
  auto b = doc::gen_random_system(opt);
  CHECK(a == b);
  opt.seed = 100;
  CHECK(!(doc::gen_random_system(opt) == a));
}

TEST_CASE("generator profiles have their documented shapes") {
  doc::GenOptions opt;
  opt.p = 5;
  opt.tau = 2;
  opt.s = 200;
  opt.seed = 31;

  auto norm = doc::gen_random_system(opt);
  CHECK(norm.precision == opt.tau + 9);
  model::System nsys = doc::to_system(norm);
  for (std::size_t i = 0; i < nsys.size(); ++i) {
    CHECK(nsys.ring().is_unit(nsys.column(i).a));
    CHECK(nsys.proj_class(i) == i % 5);  // round-robin classes
  }
  CHECK(model::check_level_bounds(nsys));

  opt.profile = "raw";
  auto raw = doc::gen_random_system(opt);
  for (const auto& c : raw.columns) CHECK(!(c.a == 0 && c.b == 0));

  opt.profile = "nonsense";
  CHECK_THROWS_AS(doc::gen_random_system(opt), std::invalid_argument);
  opt.profile = "raw";
  opt.precision = 2;  // K < tau + 2
  CHECK_THROWS_AS(doc::gen_random_system(opt), std::invalid_argument);
  opt.precision = 0;
  opt.s = 0;
  CHECK_THROWS_AS(doc::gen_random_system(opt), std::invalid_argument);
}

TEST_CASE("metadata survives emit with embedded spaces") {
  doc::SystemDocument d;
  d.p = 3;
  d.tau = 1;
  d.precision = 3;
  d.columns = {{1, 1}};
  d.metadata = {{"profile", "normalized"}, {"comment", "a b  c"}};
  std::string text = doc::emit_system(d);
  auto back = doc::parse_system(text);
  REQUIRE(back.metadata.size() == 2);
  CHECK(back.metadata[1].second == "a b  c");
}
