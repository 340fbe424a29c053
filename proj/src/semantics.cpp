#include "pnm/semantics.hpp"

#include <algorithm>

#include "pnm/error.hpp"

namespace pnm {

std::string to_string(const Sequent& s, const Signature& sig) {
  auto side = [&](const FormulaSet& fs) {
    std::string out;
    for (const auto& f : fs) {
      if (!out.empty()) out += ", ";
      out += to_string(f, sig);
    }
    return out;
  };
  return side(s.gamma) + " => " + side(s.delta);
}

// ---------------------------------------------------------------- Universe

Universe::Universe(const FormulaSet& formulas) {
  FormulaSet closed = subformulas(formulas);
  nodes_.assign(closed.begin(), closed.end());  // size order puts children first
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
  children_.resize(nodes_.size());
  parents_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_var()) continue;
    for (const auto& a : nodes_[i].args()) {
      std::size_t c = index_.at(a);
      children_[i].push_back(c);
      auto& ps = parents_[c];
      if (ps.empty() || ps.back() != i) ps.push_back(i);
    }
  }
}

std::optional<std::size_t> Universe::find(const Formula& f) const {
  auto it = index_.find(f);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Universe::at(const Formula& f) const {
  auto i = find(f);
  if (!i) throw PreconditionError("formula outside the universe");
  return *i;
}

// ---------------------------------------------------------------- assignment search

bool AssignmentSearch::revise(std::vector<ValueSet>& domains, std::size_t node,
                              std::vector<std::size_t>& changed) const {
  const Formula& f = u_[node];
  if (f.is_var()) return domains[node] != 0;
  const auto& kids = u_.children(node);
  ConnId c = f.conn();

  // Distinct children, and the slot of each argument position among them.
  std::vector<std::size_t> distinct;
  std::vector<std::size_t> slot(kids.size());
  for (std::size_t i = 0; i < kids.size(); ++i) {
    auto it = std::find(distinct.begin(), distinct.end(), kids[i]);
    slot[i] = static_cast<std::size_t>(it - distinct.begin());
    if (it == distinct.end()) distinct.push_back(kids[i]);
  }
  std::vector<std::vector<Value>> choices(distinct.size());
  for (std::size_t d = 0; d < distinct.size(); ++d) choices[d] = members(domains[distinct[d]]);

  ValueSet own = domains[node];
  ValueSet new_own = 0;
  std::vector<ValueSet> support(distinct.size(), 0);
  std::vector<std::size_t> idx(distinct.size(), 0);
  std::vector<Value> args(kids.size());
  if (std::any_of(choices.begin(), choices.end(), [](const auto& v) { return v.empty(); })) {
    domains[node] = 0;
    return false;
  }
  while (true) {
    for (std::size_t i = 0; i < kids.size(); ++i) args[i] = choices[slot[i]][idx[slot[i]]];
    ValueSet e = m_.entry(c, args) & own;
    if (e) {
      new_own |= e;
      for (std::size_t d = 0; d < distinct.size(); ++d) support[d] |= bit(choices[d][idx[d]]);
    }
    std::size_t d = distinct.size();
    while (d > 0 && ++idx[d - 1] == choices[d - 1].size()) idx[--d] = 0;
    if (d == 0) break;
  }
  if (new_own != own) {
    domains[node] = new_own;
    changed.push_back(node);
  }
  for (std::size_t d = 0; d < distinct.size(); ++d) {
    if (support[d] != domains[distinct[d]]) {
      domains[distinct[d]] = support[d];
      changed.push_back(distinct[d]);
    }
  }
  return new_own != 0;
}

bool AssignmentSearch::propagate(std::vector<ValueSet>& domains) const {
  for (ValueSet d : domains)
    if (d == 0) return false;
  std::vector<std::size_t> work;
  std::vector<bool> queued(u_.size(), false);
  for (std::size_t i = u_.size(); i-- > 0;) {
    if (!u_[i].is_var()) {
      work.push_back(i);
      queued[i] = true;
    }
  }
  std::vector<std::size_t> changed;
  while (!work.empty()) {
    std::size_t n = work.back();
    work.pop_back();
    queued[n] = false;
    changed.clear();
    if (!revise(domains, n, changed)) return false;
    for (std::size_t x : changed) {
      if (domains[x] == 0) return false;
      auto enqueue = [&](std::size_t k) {
        if (k != n && !queued[k] && !u_[k].is_var()) {
          queued[k] = true;
          work.push_back(k);
        }
      };
      enqueue(x);
      for (std::size_t p : u_.parents(x)) enqueue(p);
    }
  }
  return true;
}

std::optional<std::vector<Value>> AssignmentSearch::solve(std::vector<ValueSet> domains) const {
  if (!propagate(domains)) return std::nullopt;
  std::size_t pick = u_.size();
  unsigned best = 0;
  for (std::size_t i = 0; i < u_.size(); ++i) {
    unsigned k = count(domains[i]);
    if (k > 1 && (pick == u_.size() || k < best)) {
      pick = i;
      best = k;
    }
  }
  if (pick == u_.size()) {
    std::vector<Value> out(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i) out[i] = static_cast<Value>(std::countr_zero(domains[i]));
    return out;
  }
  for (Value v : members(domains[pick])) {
    auto next = domains;
    next[pick] = bit(v);
    if (auto r = solve(std::move(next))) return r;
  }
  return std::nullopt;
}

ValueSet AssignmentSearch::reachable(std::vector<ValueSet> domains, std::size_t i) const {
  if (!propagate(domains)) return 0;
  ValueSet out = 0;
  for (Value v : members(domains[i])) {
    auto next = domains;
    next[i] = bit(v);
    if (auto sol = solve(std::move(next))) out |= bit(v);
  }
  return out;
}

// ---------------------------------------------------------------- consequence

ConsequenceResult consequence_on(const PNMatrix& m, const Universe& u, const std::vector<ValueSet>& base_domains,
                                 const Sequent& s, const std::vector<ValueSet>& refinements) {
  ConsequenceResult res;
  if (refinements.empty()) {
    res.vacuous = true;
    return res;
  }
  for (const auto& g : s.gamma)
    if (s.delta.count(g)) return res;
  AssignmentSearch search(m, u);
  for (ValueSet r : refinements) {
    std::vector<ValueSet> dom(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) dom[i] = base_domains[i] & r;
    for (const auto& g : s.gamma) dom[u.at(g)] &= m.designated();
    for (const auto& d : s.delta) dom[u.at(d)] &= ~m.designated();
    if (auto sol = search.solve(std::move(dom))) {
      res.holds = false;
      Countermodel cm;
      cm.refinement = r;
      for (std::size_t i = 0; i < u.size(); ++i) cm.assignment.emplace(u[i], (*sol)[i]);
      res.countermodel = std::move(cm);
      return res;
    }
  }
  return res;
}

ConsequenceResult consequence(const PNMatrix& m, const Sequent& s, const std::vector<ValueSet>* refinements) {
  std::vector<ValueSet> local;
  if (!refinements) {
    local = total_refinements(m);
    refinements = &local;
  }
  FormulaSet all = s.gamma;
  all.insert(s.delta.begin(), s.delta.end());
  Universe u(all);
  return consequence_on(m, u, std::vector<ValueSet>(u.size(), m.values()), s, *refinements);
}

ValueSet eval_formula(const PNMatrix& m, const Formula& a, const std::vector<Value>& args,
                      const std::vector<ValueSet>* refinements) {
  for (unsigned v : variables(a))
    if (v > args.size()) throw PreconditionError("eval_formula: no value supplied for p" + std::to_string(v));
  for (Value x : args)
    if (x >= m.size()) throw PreconditionError("eval_formula: value out of range");
  std::vector<ValueSet> local;
  if (!refinements) {
    local = total_refinements(m);
    refinements = &local;
  }
  // every supplied p_i is part of the valuation, used in a or not
  ValueSet needed = 0;
  for (Value x : args) needed |= bit(x);
  Universe u(FormulaSet{a});
  AssignmentSearch search(m, u);
  ValueSet out = 0;
  for (ValueSet r : *refinements) {
    if (needed & ~r) continue;
    std::vector<ValueSet> dom(u.size(), r);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (u[i].is_var()) dom[i] = bit(args[u[i].var_index() - 1]);
    out |= search.reachable(std::move(dom), u.at(a));
  }
  return out;
}

// ---------------------------------------------------------------- oracle

bool is_axiom_instance(const Formula& f, const std::vector<SimpleAxiom>& axioms) {
  for (const auto& ax : axioms) {
    Substitution b;
    if (match(ax.canonical, f, b)) return true;
  }
  return false;
}

OracleUniverse build_oracle_universe(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms,
                                     const FormulaSet& seed, const OracleOptions& opt) {
  const auto& sig = m.signature();
  FormulaSet pool = subformulas(seed);
  LookaheadSet theta = lookahead_set(axioms);
  auto check_cap = [&](std::size_t n) {
    if (n > opt.max_universe)
      throw ResourceError("oracle universe exceeds " + std::to_string(opt.max_universe) + " formulas");
  };
  for (unsigned round = 0; round < opt.universe_depth; ++round) {
    FormulaSet next = pool;
    for (const auto& a : pool)
      for (const auto& w : theta)
        if (!w.empty()) collect_subformulas(apply_string(w, a, sig), next);
    check_cap(next.size());
    if (next.size() == pool.size()) break;
    pool = std::move(next);
  }

  std::vector<Formula> range(pool.begin(), pool.end());
  FormulaSet all = pool;
  for (const auto& ax : axioms) {
    std::vector<unsigned> vars;
    for (unsigned v : variables(ax.canonical)) vars.push_back(v);
    std::vector<std::size_t> idx(vars.size(), 0);
    if (range.empty()) break;
    while (true) {
      Substitution sigma;
      for (std::size_t i = 0; i < vars.size(); ++i) sigma[vars[i]] = range[idx[i]];
      collect_subformulas(substitute(ax.canonical, sigma), all);
      check_cap(all.size());
      std::size_t d = vars.size();
      while (d > 0 && ++idx[d - 1] == range.size()) idx[--d] = 0;
      if (d == 0) break;
    }
  }

  OracleUniverse out{Universe(all), {}};
  out.instance.resize(out.universe.size());
  for (std::size_t i = 0; i < out.universe.size(); ++i)
    out.instance[i] = is_axiom_instance(out.universe[i], axioms);
  return out;
}

OracleResult axiom_consequence_oracle(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, const Sequent& s,
                                      const OracleOptions& opt) {
  FormulaSet seed = s.gamma;
  seed.insert(s.delta.begin(), s.delta.end());
  OracleUniverse ou = build_oracle_universe(m, axioms, seed, opt);
  std::vector<ValueSet> dom(ou.universe.size(), m.values());
  std::size_t instances = 0;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (ou.instance[i]) {
      dom[i] &= m.designated();
      ++instances;
    }
  }
  auto refs = total_refinements(m);
  auto r = consequence_on(m, ou.universe, dom, s, refs);
  OracleResult out;
  out.holds = r.holds;
  out.candidate = std::move(r.countermodel);
  out.universe_size = ou.universe.size();
  out.instances = instances;
  return out;
}

}  // namespace pnm
