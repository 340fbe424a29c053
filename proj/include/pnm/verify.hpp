#pragma once

#include <cstddef>
#include <vector>

#include "pnm/matrix.hpp"
#include "pnm/semantics.hpp"
#include "pnm/sharp.hpp"
#include "pnm/syntax.hpp"

namespace pnm {

// ---------------------------------------------------------------- sequent suites

/// Every formula over p1..p_vars of depth at most `depth`, smallest first.
std::vector<Formula> formulas_up_to(const Signature& sig, unsigned vars, unsigned depth);

struct SuiteOptions {
  unsigned vars = 2;
  unsigned depth = 2;       // single-formula sequents ∅ ⊳ A and A ⊳ ∅ range over this depth
  unsigned pair_depth = 1;  // multi-formula sides range over this depth
  unsigned max_side = 2;
};

/// Sequents with disjoint sides of size at most max_side over formulas of depth ≤ pair_depth,
/// plus ∅ ⊳ A and A ⊳ ∅ for every A of depth ≤ depth. Deterministic order, no duplicates.
std::vector<Sequent> exhaustive_suite(const Signature& sig, const SuiteOptions& opt = {});

// ---------------------------------------------------------------- flat slice

/// The restriction of the flat strengthened matrix to pairs (x, A) with A in a finite universe.
struct FlatSlice {
  Universe universe;
  std::vector<ValueSet> domains;  // node -> {x : (x, A) is a value}
  std::vector<bool> instance;     // node is a recognised axiom instance
  ValueSet designated = 0;        // (x, A) designated iff x in this set

  std::size_t value_count() const;
  bool has_value(Value x, std::size_t node) const { return contains(domains[node], x); }
  /// ©((x1,A1),...,(xk,Ak)) as (value, node) pairs; empty when ©(A1..Ak) lies outside the universe.
  std::vector<std::pair<Value, std::size_t>> entry(const PNMatrix& m, ConnId c,
                                                   const std::vector<std::pair<Value, std::size_t>>& args) const;
};

FlatSlice flat_slice(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, const Universe& u);
/// Consequence over the slice; every formula of the sequent must lie in the slice's universe.
ConsequenceResult slice_consequence(const PNMatrix& m, const FlatSlice& slice, const Sequent& s);

// ---------------------------------------------------------------- probes and cross-checks

struct ProbeResult {
  std::vector<std::vector<Value>> witnessed;  // Θ-profiles consistent with the bounded universe
  std::vector<std::vector<Value>> refuted;    // chain-realisable profiles that are not
};

/// For each chain-realisable profile f, asks whether some assignment to the bounded oracle universe
/// around {w p1 : w ∈ Θ} respects the tables, designates every recognised axiom instance and gives
/// w p1 the value f(w). `theta` is the canonical order used by SharpResult.
ProbeResult sharp_semantic_probe(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, unsigned depth,
                                 std::size_t max_universe = 20000);

struct Disagreement {
  Sequent sequent;
  Countermodel sharp_countermodel;
};

struct VerifyReport {
  std::size_t checked = 0;
  std::size_t both_hold = 0;
  std::size_t both_fail = 0;
  std::size_t inconclusive = 0;  // strengthened matrix holds, bounded oracle fails
  std::vector<Disagreement> disagreements;  // oracle holds, strengthened matrix fails
};

/// The oracle runs at universe depth 0 first and deepens up to opt.universe_depth only where it is
/// inconclusive.
VerifyReport verify_equivalence(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, const PNMatrix& sharp,
                                const std::vector<Sequent>& suite, const OracleOptions& opt = {}, unsigned jobs = 1);

/// Compares two matrices on a suite; returns the sequents where they differ.
std::vector<Sequent> compare_consequence(const PNMatrix& a, const PNMatrix& b, const std::vector<Sequent>& suite,
                                         unsigned jobs = 1);

}  // namespace pnm
