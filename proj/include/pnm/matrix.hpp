#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnm/syntax.hpp"

namespace pnm {

using Value = unsigned;
/// A set of value ids, bit i standing for value i. Matrices have at most 64 values.
using ValueSet = std::uint64_t;
inline constexpr std::size_t kMaxValues = 64;

inline ValueSet bit(Value v) { return ValueSet{1} << v; }
inline bool contains(ValueSet s, Value v) { return (s >> v) & 1U; }
inline unsigned count(ValueSet s) { return static_cast<unsigned>(std::popcount(s)); }
inline ValueSet all_values(std::size_t n) { return n >= 64 ? ~ValueSet{0} : (ValueSet{1} << n) - 1; }
std::vector<Value> members(ValueSet s);

/// Finite partial non-deterministic matrix. Tables are stored densely in mixed radix,
/// first argument most significant; an empty entry encodes partiality.
class PNMatrix {
 public:
  PNMatrix() = default;
  PNMatrix(Signature sig, std::vector<std::string> labels, ValueSet designated);

  const Signature& signature() const { return sig_; }
  std::size_t size() const { return labels_.size(); }
  ValueSet values() const { return all_values(size()); }
  const std::string& label(Value v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<Value> find_label(std::string_view label) const;
  std::string format(ValueSet s) const;  // "{a,b}"

  ValueSet designated() const { return designated_; }
  bool is_designated(Value v) const { return contains(designated_, v); }

  std::size_t row_count(ConnId c) const { return tables_.at(c).size(); }
  std::size_t row_index(std::span<const Value> args) const;
  std::vector<Value> row_args(ConnId c, std::size_t row) const;
  ValueSet entry(ConnId c, std::span<const Value> args) const { return tables_[c][row_index(args)]; }
  ValueSet entry(ConnId c, std::initializer_list<Value> args) const {
    return entry(c, std::span<const Value>(args.begin(), args.size()));
  }
  ValueSet entry_at(ConnId c, std::size_t row) const { return tables_[c][row]; }
  void set_entry(ConnId c, std::span<const Value> args, ValueSet s);
  void set_entry_at(ConnId c, std::size_t row, ValueSet s);

  /// Restricted to `conns` (all connectives when empty).
  bool is_deterministic(std::span<const ConnId> conns = {}) const;
  bool is_total(std::span<const ConnId> conns = {}) const;

  friend bool operator==(const PNMatrix&, const PNMatrix&) = default;

 private:
  Signature sig_;
  std::vector<std::string> labels_;
  ValueSet designated_ = 0;
  std::vector<std::vector<ValueSet>> tables_;
};

/// M_{V'}: values renumbered in increasing id order, labels kept.
PNMatrix simple_refinement(const PNMatrix& m, ValueSet keep);
/// Whether every entry of M_{keep} over tuples in `keep` meets `keep`.
bool is_total_on(const PNMatrix& m, ValueSet keep);
/// All ⊆-maximal non-empty V' with M_{V'} total, sorted by their bit patterns.
std::vector<ValueSet> total_refinements(const PNMatrix& m);
/// X ∈ T_M: X lies inside some non-empty total simple refinement.
bool t_m_contains(const std::vector<ValueSet>& refinements, ValueSet x);
bool t_m_contains(const PNMatrix& m, ValueSet x);

/// E maps each old value to a non-empty set of fresh labels; images must be disjoint.
struct ExpansionFunction {
  std::vector<std::vector<std::string>> images;
};

struct Expansion {
  PNMatrix matrix;
  std::vector<Value> contraction;  // new value -> old value
};

Expansion expand(const PNMatrix& m, const ExpansionFunction& e);
/// Validates that `candidate` refines `m` (values matched by label, tables entrywise
/// included, designation preserved) and returns it.
PNMatrix refine(const PNMatrix& m, const PNMatrix& candidate);

/// An isomorphism from a to b as a value map, if one exists.
std::optional<std::vector<Value>> find_isomorphism(const PNMatrix& a, const PNMatrix& b);

}  // namespace pnm
