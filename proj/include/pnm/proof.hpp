#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pnm/calculus.hpp"
#include "pnm/semantics.hpp"
#include "pnm/syntax.hpp"

namespace pnm {

/// A node of a branching proof. An expansion has one child per distinct instantiated conclusion;
/// a closed node is an expansion by a rule without conclusions; a leaf reaches a goal.
struct ProofNode {
  enum class Kind { Expansion, Closed, Leaf };
  Kind kind = Kind::Leaf;
  std::string rule;
  Substitution instance;
  Formula goal;
  std::vector<std::pair<Formula, ProofNode>> children;

  static ProofNode leaf(Formula goal);
  std::size_t node_count() const;
};

struct ProofTree {
  Sequent sequent;
  ProofNode root;
};

struct ProofCheck {
  bool ok = true;
  std::string diagnostic;  // first violation found
};

/// Validates the tree against the rules, the sequent and U = sub_S(Γ ∪ Δ).
ProofCheck check_proof(const ProofTree& t, const Calculus& calc);

struct ProveLimits {
  std::size_t max_nodes = 2'000'000;  // proof nodes plus explored states
  double max_seconds = 60.0;
};

struct ProveResult {
  std::optional<ProofTree> proof;
  FormulaSet saturated;  // on failure: a branch state no rule instance can extend
  std::size_t explored = 0;
};

/// Bounded search within U = sub_S(Γ ∪ Δ). Throws ResourceError when a limit is hit.
ProveResult prove(const Calculus& calc, const Sequent& s, const ProveLimits& limits = {});

/// Whether the rule, read as a sequent over its own variables, is provable in the calculus.
bool derives(const Calculus& calc, const Rule& r, const ProveLimits& limits = {});

std::string render_text(const ProofTree& t, const Signature& sig);
std::string render_dot(const ProofTree& t, const Signature& sig);
/// Parses the format produced by render_text.
ProofTree parse_proof(std::string_view text, const Signature& sig);

}  // namespace pnm
