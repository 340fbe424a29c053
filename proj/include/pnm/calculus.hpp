#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pnm/matrix.hpp"
#include "pnm/sharp.hpp"
#include "pnm/syntax.hpp"

namespace pnm {

// ---------------------------------------------------------------- separators

/// S_M(x): values of the single-variable formula s when p1 takes x.
ValueSet separator_profile(const PNMatrix& m, const Formula& s, Value x, const std::vector<ValueSet>& refinements);

/// Whether s separates x from y: one profile lies inside D, the other outside, both non-empty.
bool separates(const PNMatrix& m, const Formula& s, Value x, Value y, const std::vector<ValueSet>& refinements);

/// A separator per unordered pair of values, with the induced per-value families and partitions.
struct Discriminator {
  std::vector<std::vector<Formula>> pair;  // pair[x][y] for x != y, empty formula slot unused on the diagonal
  std::vector<FormulaSet> family;          // S̃_x
  std::vector<FormulaSet> omega;           // separators in S̃_x designated at x
  std::vector<FormulaSet> mho;             // separators in S̃_x undesignated at x

  std::size_t size() const { return family.size(); }
  /// Every separator used, in formula order.
  FormulaSet separators() const;
};

struct SeparatorSearch {
  std::optional<Discriminator> discriminator;
  std::vector<std::pair<Value, Value>> inseparable;  // pairs left without a separator
};

/// Iterative deepening over formulas in p1, ordered by depth, size, then connective declaration order.
SeparatorSearch find_separators(const PNMatrix& m, unsigned max_depth);

/// Uses, for every pair, the first candidate in the given order that separates it.
SeparatorSearch discriminator_from(const PNMatrix& m, const std::vector<Formula>& candidates);

/// Lifts a discriminator of the base matrix along Θ: values differing first at w get S(w p1) for the
/// base separator S of their projections at w. Pairs whose proposal fails validation fall back to
/// find_separators at `fallback_depth`.
SeparatorSearch transfer_discriminator(const PNMatrix& base, const Discriminator& base_disc, const SharpResult& sharp,
                                       unsigned fallback_depth);

/// Recomputes every profile; returns an empty string when the discriminator is valid for m.
std::string validate_discriminator(const PNMatrix& m, const Discriminator& d);

// ---------------------------------------------------------------- rules

enum class RuleOrigin { Exists, Designation, Connective, Totality, User };

/// A multiple-conclusion rule over the schematic variables p1, p2, ...
struct Rule {
  std::string name;
  FormulaSet premises;
  FormulaSet conclusions;
  RuleOrigin origin = RuleOrigin::User;

  bool operator==(const Rule& o) const { return premises == o.premises && conclusions == o.conclusions; }
};

struct Calculus {
  Signature signature;
  std::vector<Formula> separators;
  std::vector<Rule> rules;

  const Rule* find(const std::string& name) const;
};

/// R_∃ ∪ R_D ∪ R_Σ ∪ R_T for a valid discriminator; R_T uses ⊆-minimal X only and trivial rules are dropped.
Calculus generate_calculus(const PNMatrix& m, const Discriminator& d);

bool is_trivial(const Rule& r);
/// Renames variables to p1..pn, choosing the renaming with the least (premises, conclusions).
Rule canonical_rule(const Rule& r);
/// Whether some map from general's variables to specific's variables sends premises and conclusions into specific's.
bool subsumes(const Rule& general, const Rule& specific);
/// Drops trivial, duplicate and subsumed rules; keeps the first occurrence's name and order.
std::vector<Rule> simplify(const std::vector<Rule>& rules);

/// Drops conclusions, then premises, largest first, while the rule stays sound in m. Each result is
/// at least as strong as its source and still sound, so derivability is unchanged.
std::vector<Rule> strengthen(const PNMatrix& m, const std::vector<Rule>& rules, unsigned jobs = 1);

/// Sound iff premises ⊳_M conclusions.
bool rule_sound(const PNMatrix& m, const Rule& r, const std::vector<ValueSet>* refinements = nullptr);
/// Indices of unsound rules.
std::vector<std::size_t> unsound_rules(const PNMatrix& m, const std::vector<Rule>& rules, unsigned jobs = 1);

std::string origin_name(RuleOrigin o);

// ---------------------------------------------------------------- files

/// signature { ... } separators { ... } rule <name> { premises { ... } conclusions { ... } } ...
Calculus parse_calculus(std::string_view text);
Calculus load_calculus(const std::string& path);
std::string write_calculus(const Calculus& c);
/// Partition table as "x : omega | mho" lines, separators printed in formula order.
std::string write_partitions(const PNMatrix& m, const Discriminator& d);

}  // namespace pnm
