#include "pnm/sharp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "pnm/error.hpp"

namespace pnm {

std::vector<SimpleAxiom> decompose_all(const std::vector<Formula>& axioms, const Signature& sig) {
  std::vector<SimpleAxiom> out;
  out.reserve(axioms.size());
  for (const auto& a : axioms) out.push_back(decompose_simple(a, sig));
  return out;
}

// ---------------------------------------------------------------- deterministic witness

namespace {

struct UnionFind {
  std::vector<unsigned> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0U); }
  unsigned find(unsigned x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(unsigned a, unsigned b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

template <class F>
void for_each_tuple(const std::vector<std::vector<Value>>& choices, F&& f) {
  if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) return;
  std::vector<std::size_t> idx(choices.size(), 0);
  std::vector<Value> tuple(choices.size());
  while (true) {
    for (std::size_t i = 0; i < choices.size(); ++i) tuple[i] = choices[i][idx[i]];
    f(tuple);
    std::size_t d = choices.size();
    while (d > 0 && ++idx[d - 1] == choices[d - 1].size()) idx[--d] = 0;
    if (d == 0) return;
  }
}

std::size_t radix_index(const std::vector<Value>& tuple, std::size_t base) {
  std::size_t idx = 0;
  for (Value v : tuple) idx = idx * base + v;
  return idx;
}

}  // namespace

DeterministicWitness deterministic_witness(const PNMatrix& m) {
  const auto& sig = m.signature();
  auto det = sig.deterministic();
  UnionFind uf(m.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (ConnId c : det) {
      std::map<std::vector<unsigned>, Value> rep;
      for (std::size_t row = 0; row < m.row_count(c); ++row) {
        ValueSet e = m.entry_at(c, row);
        if (!e) continue;
        auto args = m.row_args(c, row);
        std::vector<unsigned> key(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) key[i] = uf.find(args[i]);
        auto [it, fresh] = rep.emplace(key, static_cast<Value>(std::countr_zero(e)));
        for (Value y : members(e)) changed = uf.unite(it->second, y) || changed;
        (void)fresh;
      }
    }
  }

  DeterministicWitness w;
  w.base = &m;
  w.class_of.resize(m.size());
  std::map<unsigned, unsigned> root_id;
  for (Value v = 0; v < m.size(); ++v) {
    auto [it, fresh] = root_id.emplace(uf.find(v), static_cast<unsigned>(root_id.size()));
    if (fresh) w.classes.push_back(0);
    w.class_of[v] = it->second;
    w.classes[it->second] |= bit(v);
  }
  for (std::size_t k = 0; k < w.classes.size(); ++k) {
    ValueSet cls = w.classes[k];
    bool any = (cls & m.designated()) != 0;
    bool all = (cls & ~m.designated()) == 0;
    if (any != all)
      throw PreconditionError("the deterministic connectives identify designated and undesignated values " +
                              m.format(cls) + "; no deterministic witness exists");
    if (any) w.designated_classes |= bit(static_cast<Value>(k));
  }
  std::size_t nc = w.classes.size();
  w.tables.resize(sig.size());
  for (ConnId c : det) {
    std::size_t rows = 1;
    for (unsigned i = 0; i < sig.arity(c); ++i) rows *= nc;
    w.tables[c].assign(rows, 0);
    for (std::size_t row = 0; row < m.row_count(c); ++row) {
      auto args = m.row_args(c, row);
      for (auto& a : args) a = w.class_of[a];
      w.tables[c][radix_index(args, nc)] |= w.contract(m.entry_at(c, row));
    }
  }
  return w;
}

ValueSet DeterministicWitness::contract(ValueSet values) const {
  ValueSet out = 0;
  for (Value v : members(values)) out |= bit(class_of[v]);
  return out;
}

ValueSet DeterministicWitness::apply(ConnId c, const std::vector<ValueSet>& args) const {
  std::vector<std::vector<Value>> choices;
  for (ValueSet a : args) choices.push_back(members(a));
  ValueSet out = 0;
  for_each_tuple(choices, [&](const std::vector<Value>& t) { out |= tables[c][radix_index(t, classes.size())]; });
  return out;
}

ValueSet DeterministicWitness::evaluate(const Formula& structure, const std::vector<ValueSet>& inputs) const {
  if (structure.is_var()) return inputs.at(structure.var_index() - 1);
  std::vector<ValueSet> args;
  for (const auto& a : structure.args()) {
    args.push_back(evaluate(a, inputs));
    if (!args.back()) return 0;
  }
  return apply(structure.conn(), args);
}

// ---------------------------------------------------------------- naming

std::vector<std::string> sharp_value_naming(const PNMatrix& base, const std::vector<LookaheadString>& theta,
                                            const std::vector<std::vector<Value>>& profiles,
                                            const std::vector<LookaheadString>& projection) {
  std::vector<std::size_t> positions;
  if (projection.empty()) {
    positions.resize(theta.size());
    std::iota(positions.begin(), positions.end(), 0);
  } else {
    for (const auto& w : projection) {
      auto it = std::find(theta.begin(), theta.end(), w);
      if (it == theta.end())
        throw PreconditionError("naming string " + to_string(w, base.signature()) + " is not in the look-ahead set");
      positions.push_back(static_cast<std::size_t>(it - theta.begin()));
    }
  }
  bool dotted = std::any_of(base.labels().begin(), base.labels().end(), [](const auto& l) { return l.size() > 1; });
  std::vector<std::string> out;
  for (const auto& f : profiles) {
    std::string label;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (dotted && i) label += '.';
      label += base.label(f[positions[i]]);
    }
    out.push_back(std::move(label));
  }
  std::set<std::string> seen(out.begin(), out.end());
  if (seen.size() != out.size()) throw PreconditionError("the chosen naming strings do not identify values uniquely");
  return out;
}

std::vector<std::string> SharpResult::comments(const PNMatrix& base) const {
  std::vector<std::string> out;
  for (Value v = 0; v < matrix.size(); ++v) {
    std::string line = "value " + matrix.label(v) + " =";
    for (std::size_t i = 0; i < theta.size(); ++i)
      line += " " + to_string(theta[i], base.signature()) + ":" + base.label(profiles[v][i]);
    out.push_back(std::move(line));
  }
  return out;
}

// ---------------------------------------------------------------- construction

namespace {

class Builder {
 public:
  Builder(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms)
      : m_(m), sig_(m.signature()), axioms_(axioms), witness_(deterministic_witness(m)) {
    LookaheadSet theta = lookahead_set(axioms);
    theta_.assign(theta.begin(), theta.end());
    for (std::size_t i = 0; i < theta_.size(); ++i) theta_index_[theta_[i]] = i;
    LookaheadSet suf = suffix_closure(theta);
    suf_.assign(suf.begin(), suf.end());
  }

  const std::vector<LookaheadString>& theta() const { return theta_; }

  std::vector<std::vector<Value>> chain_candidates() const {
    std::map<LookaheadString, std::size_t> suf_index;
    for (std::size_t i = 0; i < suf_.size(); ++i) suf_index[suf_[i]] = i;
    std::set<std::vector<Value>> out;
    std::vector<Value> h(suf_.size());
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i == suf_.size()) {
        std::vector<Value> f(theta_.size());
        for (std::size_t t = 0; t < theta_.size(); ++t) {
          auto it = suf_index.find(theta_[t]);
          f[t] = h[it->second];
        }
        out.insert(std::move(f));
        return;
      }
      const auto& s = suf_[i];
      ValueSet options;
      if (s.empty()) {
        options = m_.values();
      } else {
        LookaheadString tail(s.begin() + 1, s.end());
        options = m_.entry(s.front(), {h[suf_index.at(tail)]});
      }
      for (Value v : members(options)) {
        h[i] = v;
        go(i + 1);
      }
    };
    go(0);
    return {out.begin(), out.end()};
  }

  ValueSet ext(const std::vector<Value>& f, const LookaheadString& s) const {
    auto it = theta_index_.find(s);
    if (it != theta_index_.end()) return bit(f[it->second]);
    LookaheadString tail(s.begin() + 1, s.end());
    ValueSet out = 0;
    for (Value y : members(ext(f, tail))) out |= m_.entry(s.front(), {y});
    return out;
  }

  void set_candidates(std::vector<std::vector<Value>> cands) {
    cands_ = std::move(cands);
    // ext_[a][i][o][c]: contracted values of q_i of axiom a at offset o for candidate c.
    ext_.assign(axioms_.size(), {});
    for (std::size_t a = 0; a < axioms_.size(); ++a) {
      const auto& ax = axioms_[a];
      if (!ax.r.empty()) continue;
      ext_[a].resize(ax.q.size());
      for (std::size_t i = 0; i < ax.q.size(); ++i) {
        ext_[a][i].resize(suf_.size());
        for (std::size_t o = 0; o < suf_.size(); ++o) {
          LookaheadString s = ax.q[i].w;
          s.insert(s.end(), suf_[o].begin(), suf_[o].end());
          for (const auto& c : cands_) ext_[a][i][o].push_back(witness_.contract(ext(c, s)));
        }
      }
    }
  }

  /// Variable-free axioms, and those hosted on slots over `hosts`, all evaluate designated.
  /// When `required` is set, only slot assignments using that host position are checked.
  bool slots_ok(const std::vector<std::size_t>& hosts, std::optional<std::size_t> required) const {
    for (std::size_t a = 0; a < axioms_.size(); ++a) {
      const auto& ax = axioms_[a];
      if (!ax.r.empty()) continue;
      std::vector<unsigned> vars;
      for (const auto& q : ax.q)
        if (std::find(vars.begin(), vars.end(), q.var) == vars.end()) vars.push_back(q.var);
      if (!vars.empty() && hosts.empty()) continue;
      std::size_t per_var = hosts.size() * suf_.size();
      std::vector<std::size_t> idx(vars.size(), 0);
      std::vector<ValueSet> inputs(ax.q.size());
      while (true) {
        bool uses_required = !required;
        for (std::size_t t = 0; t < vars.size(); ++t)
          if (required && idx[t] / suf_.size() == *required) uses_required = true;
        if (uses_required) {
          for (std::size_t i = 0; i < ax.q.size(); ++i) {
            auto t = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), ax.q[i].var) - vars.begin());
            std::size_t host = hosts[idx[t] / suf_.size()];
            std::size_t offset = idx[t] % suf_.size();
            inputs[i] = ext_[a][i][offset][host];
          }
          if (!(witness_.evaluate(ax.structure, inputs) & witness_.designated_classes)) return false;
        }
        std::size_t d = vars.size();
        while (d > 0 && ++idx[d - 1] == per_var) idx[--d] = 0;
        if (d == 0) break;
      }
    }
    return true;
  }

  /// Axioms whose r-terms are based on `c`, with arguments `args` and result `g`.
  bool based_ok(ConnId c, const std::vector<std::size_t>& args, std::size_t g) const {
    for (const auto& ax : axioms_) {
      if (ax.r.empty() || ax.base != c) continue;
      std::vector<ValueSet> inputs;
      for (const auto& q : ax.q) inputs.push_back(bit(witness_.class_of[cands_[args[q.var - 1]][theta_index_.at(q.w)]]));
      for (const auto& u : ax.r) inputs.push_back(bit(witness_.class_of[cands_[g][theta_index_.at(u)]]));
      if (!(witness_.evaluate(ax.structure, inputs) & witness_.designated_classes)) return false;
    }
    return true;
  }

  PNMatrix tables(const std::vector<std::string>& labels) const {
    ValueSet designated = 0;
    for (std::size_t i = 0; i < cands_.size(); ++i)
      if (m_.is_designated(cands_[i][0])) designated |= bit(static_cast<Value>(i));
    PNMatrix out(sig_, labels, designated);
    std::size_t n = cands_.size();
    for (ConnId c = 0; c < sig_.size(); ++c) {
      unsigned k = sig_.arity(c);
      bool shift = sig_.in_lookahead_alphabet(c);
      for (std::size_t row = 0; row < out.row_count(c); ++row) {
        auto vargs = out.row_args(c, row);
        std::vector<std::size_t> args(vargs.begin(), vargs.end());
        std::vector<Value> roots;
        for (auto a : args) roots.push_back(cands_[a][0]);
        ValueSet root_options = m_.entry(c, roots);
        std::vector<std::size_t> hosts = args;
        hosts.push_back(0);
        if (!root_options || !slots_ok(args, std::nullopt)) continue;
        ValueSet entry = 0;
        for (std::size_t g = 0; g < n; ++g) {
          if (!contains(root_options, cands_[g][0])) continue;
          if (shift) {
            bool ok = true;
            for (std::size_t t = 0; t < theta_.size() && ok; ++t) {
              LookaheadString s = theta_[t];
              s.push_back(c);
              ok = contains(ext(cands_[args[0]], s), cands_[g][t]);
            }
            if (!ok) continue;
          }
          if (!based_ok(c, args, g)) continue;
          hosts.back() = g;
          if (!slots_ok(hosts, k)) continue;
          entry |= bit(static_cast<Value>(g));
        }
        out.set_entry_at(c, row, entry);
      }
    }
    return out;
  }

  const std::vector<std::vector<Value>>& candidates() const { return cands_; }

 private:
  const PNMatrix& m_;
  const Signature& sig_;
  const std::vector<SimpleAxiom>& axioms_;
  DeterministicWitness witness_;
  std::vector<LookaheadString> theta_;
  std::map<LookaheadString, std::size_t> theta_index_;
  std::vector<LookaheadString> suf_;
  std::vector<std::vector<Value>> cands_;
  std::vector<std::vector<std::vector<std::vector<ValueSet>>>> ext_;
};

// Removes values lying in no total refinement and entries no total refinement supports.
PNMatrix prune_to_refinements(PNMatrix m, std::vector<std::size_t>& kept) {
  while (true) {
    auto refs = total_refinements(m);
    ValueSet alive = 0;
    for (ValueSet r : refs) alive |= r;
    bool changed = false;
    const auto& sig = m.signature();
    for (ConnId c = 0; c < sig.size(); ++c) {
      for (std::size_t row = 0; row < m.row_count(c); ++row) {
        ValueSet e = m.entry_at(c, row);
        if (!e) continue;
        ValueSet args = 0;
        for (Value a : m.row_args(c, row)) args |= bit(a);
        ValueSet supported = 0;
        for (Value g : members(e))
          if (t_m_contains(refs, args | bit(g))) supported |= bit(g);
        if (supported != e) {
          m.set_entry_at(c, row, supported);
          changed = true;
        }
      }
    }
    if (alive != m.values()) {
      std::vector<std::size_t> next;
      for (Value v : members(alive)) next.push_back(kept[v]);
      kept = std::move(next);
      m = simple_refinement(m, alive);
      changed = true;
    }
    if (!changed) return m;
  }
}

}  // namespace

SharpResult sharp_construct(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, const SharpOptions& opt) {
  for (const auto& ax : axioms)
    if (!ax.structure.is_var() && !m.signature().is_deterministic(ax.structure.conn()))
      throw PreconditionError("axiom structure must be built from deterministic connectives");
  Builder b(m, axioms);
  SharpResult res;
  res.theta = b.theta();

  std::vector<std::vector<Value>> cands = b.chain_candidates();
  b.set_candidates(cands);
  std::vector<std::vector<Value>> survivors;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (b.slots_ok({i}, std::nullopt)) survivors.push_back(cands[i]);
  if (survivors.size() > kMaxValues)
    throw ResourceError(std::to_string(survivors.size()) + " candidate values exceed the 64-value limit");
  b.set_candidates(survivors);

  std::vector<std::string> provisional;
  for (std::size_t i = 0; i < survivors.size(); ++i) provisional.push_back("v" + std::to_string(i));
  PNMatrix raw = b.tables(provisional);
  std::vector<std::size_t> kept(survivors.size());
  std::iota(kept.begin(), kept.end(), 0);
  PNMatrix pruned = prune_to_refinements(raw, kept);

  for (std::size_t i : kept) res.profiles.push_back(survivors[i]);
  if (res.profiles.empty()) res.warnings.push_back("no values survive: the strengthened matrix is empty");
  std::vector<std::string> labels;
  try {
    labels = sharp_value_naming(m, res.theta, res.profiles, opt.naming);
  } catch (const PreconditionError& e) {
    if (opt.naming.empty()) throw;
    res.warnings.push_back(std::string(e.what()) + "; using full profiles");
    labels = sharp_value_naming(m, res.theta, res.profiles);
  }
  PNMatrix named(m.signature(), labels, pruned.designated());
  for (ConnId c = 0; c < m.signature().size(); ++c)
    for (std::size_t row = 0; row < pruned.row_count(c); ++row) named.set_entry_at(c, row, pruned.entry_at(c, row));
  res.matrix = std::move(named);
  return res;
}

}  // namespace pnm
