#pragma once

#include "padsolve/congruence.hpp"
#include "padsolve/system.hpp"
#include "padsolve/zerosum.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace padsolve::pipeline {

enum class NodeKind { Primary, Secondary };

// A contraction-forest node: a leaf wraps one original column, an inner node
// is the exact mod-p^K sum of its children.  A primary node's leaf set always
// contains two level-0 columns from distinct projective classes.
struct VarNode {
  std::size_t id = 0;
  NodeKind kind = NodeKind::Secondary;
  unsigned level = 0;  // min vord of (ca, cb), capped at K
  u128 ca = 0, cb = 0;
  std::vector<std::size_t> children;    // node ids; empty for leaves
  std::optional<std::size_t> column;    // set iff leaf
};

class Forest {
 public:
  explicit Forest(const model::System& sys) : sys_(&sys), leafed_(sys.size(), 0) {}

  std::size_t add_leaf(std::size_t column);
  std::size_t contract(NodeKind kind, std::span<const std::size_t> children);
  const VarNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }

  // Original column indices under id, sorted; throws on duplicates.
  std::vector<std::size_t> leaf_columns(std::size_t id) const;

  // Recursively re-verifies that each coeff is the exact sum of its
  // children's coeffs and that stored levels match the valuations.
  void check_exact(std::size_t id) const;

 private:
  const model::System* sys_;
  std::vector<VarNode> nodes_;
  std::vector<std::uint8_t> leafed_;    // per column: already wrapped in a leaf
  std::vector<std::uint8_t> consumed_;  // per node: already a child of some node
};

struct Certificate {
  std::vector<std::size_t> support;  // sorted original column indices
  u128 modulus = 0;                  // p^{tau+1}
};

enum class SolveMode { Guaranteed, Opportunistic };

struct SolveOptions {
  SolveMode mode = SolveMode::Guaranteed;
  bool strict_constants = false;      // contraction thresholds use C = 9996
  bool allow_oracle_fallback = true;  // opportunistic mode only
};

enum class SolveStatus { Certified, Unsolvable, Rejected, PipelineFailure };

struct ContractionRecord {
  std::string stage;                 // "primaries", "stepstones", "raise", "secondaries", "final"
  std::string kind;                  // "primary" or "secondary"
  unsigned level_from = 0;
  unsigned level_to = 0;
  std::vector<std::size_t> inputs;   // node ids consumed
  std::vector<std::size_t> witness;  // positions within the presented pool
  unsigned va = 0, vb = 0;           // valuations of the new coeff (capped at K)
  std::size_t node = 0;              // id of the new node
};

struct RunLog {
  std::vector<std::string> notes;  // stage censuses, case selection, short-circuits
  std::vector<ContractionRecord> contractions;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Rejected;
  std::optional<Certificate> certificate;
  std::string diagnostic;
  RunLog log;
};

// Exit-code convention used by the CLI: Certified 0, Unsolvable 1,
// Rejected 2, PipelineFailure 3.

// The contraction pipeline: select H among level-0 columns, contract it into
// p^tau primary variables, raise them to level tau with stepstone
// secondaries, produce 2p-3 secondaries at level tau for the theorem case,
// and finish with the constrained pair solver.  Guaranteed mode checks the
// theorem-case preconditions and normalized-system bounds up front and
// reports loudly when a stage misses its guaranteed census; opportunistic
// mode attempts the pipeline on any input and may fall back to the oracle.
SolveResult solve(const model::System& sys, const SolveOptions& opts = {});

// True iff support is nonempty with valid distinct indices, both coefficient
// sums vanish mod p^{tau+1}, and the support spans rank 2 mod p.
bool verify(const model::System& sys, const Certificate& cert);

}  // namespace padsolve::pipeline
