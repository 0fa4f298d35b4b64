#pragma once

#include "padsolve/system.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace padsolve::doc {

// Line-oriented system file: optional "# key value" metadata lines, one
// header record "p tau K s", then s lines "a b" with both values in base 10,
// reduced mod p^K.  emit/parse round-trip bit-exactly on canonical text.
struct SystemDocument {
  std::uint64_t p = 3;
  unsigned tau = 1;
  unsigned precision = 3;
  std::vector<model::Column> columns;
  std::vector<std::pair<std::string, std::string>> metadata;

  bool operator==(const SystemDocument&) const = default;
};

SystemDocument parse_system(const std::string& text);  // throws std::invalid_argument
std::string emit_system(const SystemDocument& doc);
SystemDocument read_system_file(const std::string& path);  // throws std::runtime_error
void write_system_file(const std::string& path, const SystemDocument& doc);
model::System to_system(const SystemDocument& doc);
SystemDocument from_system(const model::System& sys);

// Certificates: sorted column indices, one per line; "# key value" comments allowed.
std::vector<std::size_t> parse_certificate(const std::string& text);
std::string emit_certificate(std::span<const std::size_t> support);
std::vector<std::size_t> read_certificate_file(const std::string& path);
void write_certificate_file(const std::string& path, std::span<const std::size_t> support);

struct GenOptions {
  std::uint64_t p = 3;
  unsigned tau = 1;
  std::size_t s = 1;
  std::uint64_t seed = 0;
  std::string profile = "normalized";  // "normalized" | "raw"
  unsigned precision = 0;              // 0 selects the default tau + 9
};

// Deterministic per seed.  "normalized": every column has a unit first
// coefficient and the projective classes are spread round-robin, so the
// normalized-shape bounds hold by construction (for s >= 2).  "raw": both
// coefficients uniform mod p^K, excluding the zero column.
SystemDocument gen_random_system(const GenOptions& opt);

}  // namespace padsolve::doc
