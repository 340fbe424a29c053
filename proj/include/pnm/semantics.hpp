#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pnm/matrix.hpp"
#include "pnm/syntax.hpp"

namespace pnm {

struct Sequent {
  FormulaSet gamma;
  FormulaSet delta;
};

std::string to_string(const Sequent& s, const Signature& sig);

/// A subformula-closed set of formulas, indexed so that children precede parents.
class Universe {
 public:
  Universe() = default;
  explicit Universe(const FormulaSet& formulas);  // closes under subformulas

  std::size_t size() const { return nodes_.size(); }
  const Formula& operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<Formula>& nodes() const { return nodes_; }
  std::optional<std::size_t> find(const Formula& f) const;
  std::size_t at(const Formula& f) const;
  const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_[i]; }

 private:
  std::vector<Formula> nodes_;
  std::unordered_map<Formula, std::size_t> index_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::vector<std::size_t>> parents_;
};

/// Table-respecting assignments of a universe into a matrix, found by arc-consistency
/// propagation and branching on the smallest domain.
class AssignmentSearch {
 public:
  AssignmentSearch(const PNMatrix& m, const Universe& u) : m_(m), u_(u) {}

  /// Narrows `domains` to arc consistency; false when some domain empties.
  bool propagate(std::vector<ValueSet>& domains) const;
  /// A full assignment inside `domains`, if any.
  std::optional<std::vector<Value>> solve(std::vector<ValueSet> domains) const;
  /// Values node `i` takes over all solutions inside `domains`.
  ValueSet reachable(std::vector<ValueSet> domains, std::size_t i) const;

 private:
  bool revise(std::vector<ValueSet>& domains, std::size_t node, std::vector<std::size_t>& changed) const;
  const PNMatrix& m_;
  const Universe& u_;
};

struct Countermodel {
  ValueSet refinement = 0;
  std::map<Formula, Value> assignment;
};

struct ConsequenceResult {
  bool holds = true;
  bool vacuous = false;  // the matrix has no non-empty total refinement
  std::optional<Countermodel> countermodel;
};

/// Decides Γ ⊳_M Δ. `refinements` may carry precomputed total refinements of m.
ConsequenceResult consequence(const PNMatrix& m, const Sequent& s,
                              const std::vector<ValueSet>* refinements = nullptr);

/// A_M(x1..xn): the values the formula takes over valuations assigning x_i to p_i for every supplied i.
ValueSet eval_formula(const PNMatrix& m, const Formula& a, const std::vector<Value>& args,
                      const std::vector<ValueSet>* refinements = nullptr);

struct OracleOptions {
  unsigned universe_depth = 1;
  std::size_t max_universe = 20000;
};

struct OracleResult {
  bool holds = true;                 // exact when true
  std::optional<Countermodel> candidate;  // bounded countermodel candidate when false
  std::size_t universe_size = 0;
  std::size_t instances = 0;
};

/// Γ ⊳^Ax_M Δ over a bounded universe of formulas with all recognised axiom instances designated.
OracleResult axiom_consequence_oracle(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms,
                                      const Sequent& s, const OracleOptions& opt = {});

/// The bounded universe used by the oracle, with the indices of recognised axiom instances.
struct OracleUniverse {
  Universe universe;
  std::vector<bool> instance;
};
OracleUniverse build_oracle_universe(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms,
                                     const FormulaSet& seed, const OracleOptions& opt);

/// Whether f is a substitution instance of one of the axioms.
bool is_axiom_instance(const Formula& f, const std::vector<SimpleAxiom>& axioms);

/// Consequence over a fixed universe with extra per-node domain restrictions.
ConsequenceResult consequence_on(const PNMatrix& m, const Universe& u, const std::vector<ValueSet>& base_domains,
                                 const Sequent& s, const std::vector<ValueSet>& refinements);

}  // namespace pnm
