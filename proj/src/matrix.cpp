#include "pnm/matrix.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include "pnm/error.hpp"

namespace pnm {

std::vector<Value> members(ValueSet s) {
  std::vector<Value> out;
  while (s) {
    out.push_back(static_cast<Value>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

namespace {

std::size_t power(std::size_t base, unsigned exp) {
  std::size_t r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<ConnId> all_or(std::span<const ConnId> conns, const Signature& sig) {
  if (!conns.empty()) return {conns.begin(), conns.end()};
  std::vector<ConnId> out(sig.size());
  for (ConnId c = 0; c < sig.size(); ++c) out[c] = c;
  return out;
}

}  // namespace

PNMatrix::PNMatrix(Signature sig, std::vector<std::string> labels, ValueSet designated)
    : sig_(std::move(sig)), labels_(std::move(labels)), designated_(designated) {
  if (labels_.size() > kMaxValues) throw ResourceError("matrices are limited to 64 values");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw PreconditionError("duplicate value label");
  if (designated_ & ~values()) throw PreconditionError("designated set is not a subset of the values");
  tables_.resize(sig_.size());
  for (ConnId c = 0; c < sig_.size(); ++c) tables_[c].assign(power(size(), sig_.arity(c)), 0);
}

std::optional<Value> PNMatrix::find_label(std::string_view label) const {
  for (Value v = 0; v < labels_.size(); ++v)
    if (labels_[v] == label) return v;
  return std::nullopt;
}

std::string PNMatrix::format(ValueSet s) const {
  std::string out = "{";
  bool first = true;
  for (Value v : members(s)) {
    if (!first) out += ',';
    first = false;
    out += labels_[v];
  }
  return out + "}";
}

std::size_t PNMatrix::row_index(std::span<const Value> args) const {
  std::size_t idx = 0;
  for (Value a : args) idx = idx * size() + a;
  return idx;
}

std::vector<Value> PNMatrix::row_args(ConnId c, std::size_t row) const {
  std::vector<Value> args(sig_.arity(c));
  for (std::size_t i = args.size(); i-- > 0;) {
    args[i] = static_cast<Value>(row % size());
    row /= size();
  }
  return args;
}

void PNMatrix::set_entry(ConnId c, std::span<const Value> args, ValueSet s) {
  if (args.size() != sig_.arity(c)) throw PreconditionError("arity mismatch in table row");
  set_entry_at(c, row_index(args), s);
}

void PNMatrix::set_entry_at(ConnId c, std::size_t row, ValueSet s) {
  if (s & ~values()) throw PreconditionError("table entry outside the value set");
  tables_.at(c).at(row) = s;
}

bool PNMatrix::is_deterministic(std::span<const ConnId> conns) const {
  for (ConnId c : all_or(conns, sig_))
    for (ValueSet s : tables_.at(c))
      if (count(s) > 1) return false;
  return true;
}

bool PNMatrix::is_total(std::span<const ConnId> conns) const {
  for (ConnId c : all_or(conns, sig_))
    for (ValueSet s : tables_.at(c))
      if (s == 0) return false;
  return true;
}

PNMatrix simple_refinement(const PNMatrix& m, ValueSet keep) {
  keep &= m.values();
  std::vector<Value> kept = members(keep);
  std::vector<Value> new_id(m.size(), 0);
  std::vector<std::string> labels;
  ValueSet designated = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    new_id[kept[i]] = static_cast<Value>(i);
    labels.push_back(m.label(kept[i]));
    if (m.is_designated(kept[i])) designated |= bit(static_cast<Value>(i));
  }
  PNMatrix out(m.signature(), labels, designated);
  const auto& sig = m.signature();
  for (ConnId c = 0; c < sig.size(); ++c) {
    for (std::size_t row = 0; row < out.row_count(c); ++row) {
      auto args = out.row_args(c, row);
      for (auto& a : args) a = kept[a];
      ValueSet s = 0;
      for (Value v : members(m.entry(c, args) & keep)) s |= bit(new_id[v]);
      out.set_entry_at(c, row, s);
    }
  }
  return out;
}

namespace {

// First tuple over `keep` whose entry misses `keep`, as the set of its components.
std::optional<ValueSet> violating_components(const PNMatrix& m, ValueSet keep) {
  const auto& sig = m.signature();
  std::vector<Value> vals = members(keep);
  for (ConnId c = 0; c < sig.size(); ++c) {
    unsigned k = sig.arity(c);
    std::vector<std::size_t> idx(k, 0);
    std::vector<Value> args(k);
    if (vals.empty()) return std::nullopt;
    while (true) {
      for (unsigned i = 0; i < k; ++i) args[i] = vals[idx[i]];
      if ((m.entry(c, args) & keep) == 0) {
        ValueSet comps = 0;
        for (Value a : args) comps |= bit(a);
        return comps;
      }
      unsigned i = k;
      while (i > 0 && ++idx[i - 1] == vals.size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_total_on(const PNMatrix& m, ValueSet keep) { return !violating_components(m, keep).has_value(); }

std::vector<ValueSet> total_refinements(const PNMatrix& m) {
  std::unordered_set<ValueSet> visited;
  std::vector<ValueSet> found;
  std::vector<ValueSet> stack{m.values()};
  while (!stack.empty()) {
    ValueSet s = stack.back();
    stack.pop_back();
    if (s == 0 || !visited.insert(s).second) continue;
    // A subset of something already found cannot be maximal.
    if (std::any_of(found.begin(), found.end(), [&](ValueSet f) { return (s & ~f) == 0; })) continue;
    auto comps = violating_components(m, s);
    if (!comps) {
      found.push_back(s);
      continue;
    }
    // A 0-ary connective with an empty entry has no components: nothing is total.
    for (Value v : members(*comps)) stack.push_back(s & ~bit(v));
  }
  std::vector<ValueSet> maximal;
  for (ValueSet s : found)
    if (std::none_of(found.begin(), found.end(), [&](ValueSet f) { return f != s && (s & ~f) == 0; }))
      maximal.push_back(s);
  std::sort(maximal.begin(), maximal.end());
  maximal.erase(std::unique(maximal.begin(), maximal.end()), maximal.end());
  return maximal;
}

bool t_m_contains(const std::vector<ValueSet>& refinements, ValueSet x) {
  return std::any_of(refinements.begin(), refinements.end(), [&](ValueSet r) { return (x & ~r) == 0; });
}

bool t_m_contains(const PNMatrix& m, ValueSet x) { return t_m_contains(total_refinements(m), x); }

Expansion expand(const PNMatrix& m, const ExpansionFunction& e) {
  if (e.images.size() != m.size()) throw PreconditionError("expansion must map every value");
  std::vector<std::string> labels;
  std::vector<Value> contraction;
  std::vector<ValueSet> image_set(m.size(), 0);
  ValueSet designated = 0;
  for (Value x = 0; x < m.size(); ++x) {
    if (e.images[x].empty()) throw PreconditionError("expansion image of " + m.label(x) + " is empty");
    for (const auto& l : e.images[x]) {
      if (std::find(labels.begin(), labels.end(), l) != labels.end())
        throw PreconditionError("expansion images overlap at " + l);
      auto y = static_cast<Value>(labels.size());
      labels.push_back(l);
      contraction.push_back(x);
      image_set[x] |= bit(y);
      if (m.is_designated(x)) designated |= bit(y);
    }
  }
  PNMatrix out(m.signature(), labels, designated);
  for (ConnId c = 0; c < m.signature().size(); ++c) {
    for (std::size_t row = 0; row < out.row_count(c); ++row) {
      auto args = out.row_args(c, row);
      for (auto& a : args) a = contraction[a];
      ValueSet s = 0;
      for (Value x : members(m.entry(c, args))) s |= image_set[x];
      out.set_entry_at(c, row, s);
    }
  }
  return {std::move(out), std::move(contraction)};
}

PNMatrix refine(const PNMatrix& m, const PNMatrix& candidate) {
  if (!(candidate.signature() == m.signature())) throw PreconditionError("refinement changes the signature");
  std::vector<Value> to_m(candidate.size());
  for (Value v = 0; v < candidate.size(); ++v) {
    auto x = m.find_label(candidate.label(v));
    if (!x) throw PreconditionError("refinement introduces value " + candidate.label(v));
    if (m.is_designated(*x) != candidate.is_designated(v))
      throw PreconditionError("refinement changes designation of " + candidate.label(v));
    to_m[v] = *x;
  }
  const auto& sig = m.signature();
  for (ConnId c = 0; c < sig.size(); ++c) {
    for (std::size_t row = 0; row < candidate.row_count(c); ++row) {
      auto args = candidate.row_args(c, row);
      ValueSet mine = candidate.entry_at(c, row);
      for (auto& a : args) a = to_m[a];
      ValueSet theirs = m.entry(c, args);
      for (Value v : members(mine))
        if (!contains(theirs, to_m[v]))
          throw PreconditionError("refinement violation in table " + sig.name(c));
    }
  }
  return candidate;
}

std::optional<std::vector<Value>> find_isomorphism(const PNMatrix& a, const PNMatrix& b) {
  if (!(a.signature() == b.signature()) || a.size() != b.size()) return std::nullopt;
  const auto& sig = a.signature();
  std::size_t n = a.size();
  std::vector<Value> map(n);
  std::vector<bool> used(n, false);

  auto map_set = [&](ValueSet s) {
    ValueSet out = 0;
    for (Value v : members(s)) out |= bit(map[v]);
    return out;
  };
  auto consistent = [&](std::size_t assigned) {
    // Check every row whose arguments and entry are fully mapped.
    ValueSet done = all_values(assigned);
    for (ConnId c = 0; c < sig.size(); ++c) {
      for (std::size_t row = 0; row < a.row_count(c); ++row) {
        auto args = a.row_args(c, row);
        bool ready = std::all_of(args.begin(), args.end(), [&](Value v) { return v < assigned; });
        if (!ready) continue;
        ValueSet e = a.entry_at(c, row);
        std::vector<Value> bargs(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) bargs[i] = map[args[i]];
        ValueSet be = b.entry(c, bargs);
        ValueSet mapped_done = map_set(e & done);
        if ((be & mapped_done) != mapped_done) return false;
        if (count(be) != count(e)) return false;
        if ((e & ~done) == 0 && be != mapped_done) return false;
      }
    }
    return true;
  };

  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == n) return true;
    for (Value y = 0; y < n; ++y) {
      if (used[y] || a.is_designated(static_cast<Value>(i)) != b.is_designated(y)) continue;
      map[i] = y;
      used[y] = true;
      if (consistent(i + 1) && go(i + 1)) return true;
      used[y] = false;
    }
    return false;
  };
  if (!go(0)) return std::nullopt;
  return map;
}

}  // namespace pnm
