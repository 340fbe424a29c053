#pragma once

#include <string>
#include <vector>

#include "pnm/matrix.hpp"
#include "pnm/syntax.hpp"

namespace pnm {

/// Decomposes every axiom, reporting the first one that is not simple.
std::vector<SimpleAxiom> decompose_all(const std::vector<Formula>& axioms, const Signature& sig);

/// Least congruence of the Σd tables: merges values that Σd cannot tell apart
/// deterministically. Its quotient is the deterministic witness the construction
/// evaluates structure formulas in.
struct DeterministicWitness {
  std::vector<unsigned> class_of;       // value -> class
  std::vector<ValueSet> classes;        // class -> values
  ValueSet designated_classes = 0;
  const PNMatrix* base = nullptr;

  /// Σd connective applied to sets of classes.
  ValueSet apply(ConnId c, const std::vector<ValueSet>& args) const;
  ValueSet contract(ValueSet values) const;
  /// Structure formula value with placeholder variable i+1 ranging over inputs[i].
  ValueSet evaluate(const Formula& structure, const std::vector<ValueSet>& inputs) const;

  std::vector<std::vector<ValueSet>> tables;  // per Σd connective, per class tuple (mixed radix)
};

/// Throws PreconditionError when the Σd tables admit no designation-respecting deterministic quotient.
DeterministicWitness deterministic_witness(const PNMatrix& m);

struct SharpOptions {
  /// Strings whose values name each strengthened value; empty means all of Θ.
  std::vector<LookaheadString> naming;
};

struct SharpResult {
  PNMatrix matrix;
  std::vector<LookaheadString> theta;        // canonical order, ε first
  std::vector<std::vector<Value>> profiles;  // per strengthened value: f(w) for w in theta
  std::vector<std::string> warnings;

  /// Traceability comments "value <label> = eps:x neg:y ...".
  std::vector<std::string> comments(const PNMatrix& base) const;
  /// ε-projection: strengthened value -> base value.
  Value contraction(Value v) const { return profiles.at(v).front(); }
};

/// The strengthened matrix M♯_Ax.
SharpResult sharp_construct(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, const SharpOptions& opt = {});

/// Labels for profiles: concatenation of base labels along `projection` (all of Θ
/// when empty), dot-separated when some base label is longer than one character.
std::vector<std::string> sharp_value_naming(const PNMatrix& base, const std::vector<LookaheadString>& theta,
                                            const std::vector<std::vector<Value>>& profiles,
                                            const std::vector<LookaheadString>& projection = {});

}  // namespace pnm
