#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pnm {

using ConnId = std::uint16_t;

struct Connective {
  std::string name;
  unsigned arity = 0;
};

/// Connectives in declaration order plus the deterministic subset Σd.
/// U (the look-ahead alphabet) is every 1-place connective outside Σd.
class Signature {
 public:
  Signature() = default;

  ConnId add(std::string name, unsigned arity);
  void set_deterministic(ConnId c, bool det = true);

  std::size_t size() const { return conns_.size(); }
  const Connective& operator[](ConnId c) const { return conns_.at(c); }
  const std::string& name(ConnId c) const { return conns_.at(c).name; }
  unsigned arity(ConnId c) const { return conns_.at(c).arity; }
  std::optional<ConnId> find(std::string_view name) const;
  ConnId require(std::string_view name) const;

  bool is_deterministic(ConnId c) const { return det_.at(c); }
  bool in_lookahead_alphabet(ConnId c) const { return arity(c) == 1 && !det_.at(c); }
  std::vector<ConnId> lookahead_alphabet() const;
  std::vector<ConnId> deterministic() const;

  friend bool operator==(const Signature&, const Signature&);

 private:
  std::vector<Connective> conns_;
  std::vector<bool> det_;
  std::unordered_map<std::string, ConnId> by_name_;
};

/// Immutable formula tree with structural equality. Variables are p1, p2, ...
class Formula {
 public:
  Formula() = default;  // the null formula; only valid as a placeholder

  static Formula var(unsigned index);
  static Formula app(ConnId conn, std::vector<Formula> args);

  explicit operator bool() const { return node_ != nullptr; }
  bool is_var() const { return node_->is_var; }
  unsigned var_index() const { return node_->index; }
  ConnId conn() const { return static_cast<ConnId>(node_->index); }
  std::span<const Formula> args() const { return node_->args; }
  const Formula& arg(std::size_t i) const { return node_->args[i]; }

  std::size_t hash() const { return node_->hash; }
  unsigned depth() const { return node_->depth; }
  unsigned size() const { return node_->size; }

  friend bool operator==(const Formula& a, const Formula& b);
  /// Total order: size first, then variables before applications, then structure.
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node {
    bool is_var;
    unsigned index;
    std::vector<Formula> args;
    std::size_t hash;
    unsigned depth;
    unsigned size;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

using FormulaSet = std::set<Formula>;
using Substitution = std::map<unsigned, Formula>;

Formula parse_formula(std::string_view text, const Signature& sig);
/// Parses one formula starting at `pos` (leading whitespace skipped) and advances `pos`.
Formula parse_formula_at(std::string_view text, std::size_t& pos, const Signature& sig);
std::string to_string(const Formula& f, const Signature& sig);
std::string to_string(const FormulaSet& fs, const Signature& sig);

Formula substitute(const Formula& a, const Substitution& sigma);
/// The substitution x ↦ (sigma(x))^tau, i.e. apply sigma first, then tau.
Substitution compose(const Substitution& sigma, const Substitution& tau);
/// Pattern matching: extends `binding` so that pattern^binding == target.
bool match(const Formula& pattern, const Formula& target, Substitution& binding);

std::set<unsigned> variables(const Formula& a);
void collect_subformulas(const Formula& a, FormulaSet& out);
FormulaSet subformulas(const Formula& a);
FormulaSet subformulas(const FormulaSet& gamma);
/// sub(Γ) ∪ {S(B) : S ∈ separators, B ∈ sub(Γ)}; separators use only p1.
FormulaSet s_subformulas(const FormulaSet& gamma, const std::vector<Formula>& separators);

/// A string over U, outermost symbol first: (b1...bn)A = b1(b2(...bn A)).
using LookaheadString = std::vector<ConnId>;

Formula apply_string(const LookaheadString& w, const Formula& a, const Signature& sig);
std::string to_string(const LookaheadString& w, const Signature& sig);
/// Canonical order on strings: length, then lexicographic by declaration order.
bool lookahead_less(const LookaheadString& a, const LookaheadString& b);
std::vector<LookaheadString> prefixes(const LookaheadString& w);
std::vector<LookaheadString> suffixes(const LookaheadString& w);

struct LookaheadLess {
  bool operator()(const LookaheadString& a, const LookaheadString& b) const {
    return lookahead_less(a, b);
  }
};
using LookaheadSet = std::set<LookaheadString, LookaheadLess>;

/// A Σd-simple axiom B = A^σ with σ(q_i) = w_i p_{j_i} and σ(r_l) = u_l ©(p1,...,pk).
/// In `structure` placeholders q1..qn are variables 1..n and r1..rm are n+1..n+m.
struct SimpleAxiom {
  struct VarBinding {
    LookaheadString w;
    unsigned var = 0;  // j, 1-based
  };
  ConnId base = 0;
  unsigned base_arity = 0;
  bool base_forced = false;  // true when r-terms fix the base connective
  Formula structure;
  std::vector<VarBinding> q;
  std::vector<LookaheadString> r;
  Formula source;     // as written
  Formula canonical;  // after renaming the variables to p1..pk

  std::size_t num_vars() const;
  Formula placeholder_image(std::size_t placeholder, const Signature& sig) const;
  Formula resubstitute(const Signature& sig) const;
};

SimpleAxiom decompose_simple(const Formula& b, const Signature& sig);
LookaheadSet lookahead_set(const std::vector<SimpleAxiom>& axioms);
/// Closure of a string set under taking suffixes.
LookaheadSet suffix_closure(const LookaheadSet& theta);

}  // namespace pnm

template <>
struct std::hash<pnm::Formula> {
  std::size_t operator()(const pnm::Formula& f) const { return f.hash(); }
};
