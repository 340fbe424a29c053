#include "pnm/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <set>

#include "pnm/error.hpp"
#include "pnm/parallel.hpp"

namespace pnm {

// ---------------------------------------------------------------- suites

std::vector<Formula> formulas_up_to(const Signature& sig, unsigned vars, unsigned depth) {
  std::vector<Formula> all;
  for (unsigned v = 1; v <= vars; ++v) all.push_back(Formula::var(v));
  for (ConnId c = 0; c < sig.size(); ++c)
    if (sig.arity(c) == 0) all.push_back(Formula::app(c, {}));
  std::size_t level_start = 0;
  for (unsigned d = 1; d <= depth; ++d) {
    std::size_t prev_end = all.size();
    std::vector<Formula> fresh;
    for (ConnId c = 0; c < sig.size(); ++c) {
      unsigned k = sig.arity(c);
      if (k == 0) continue;
      // Arguments from everything so far, with at least one from the previous level.
      std::vector<std::size_t> idx(k, 0);
      while (true) {
        bool new_level = std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return i >= level_start; });
        if (new_level) {
          std::vector<Formula> args;
          for (std::size_t i : idx) args.push_back(all[i]);
          fresh.push_back(Formula::app(c, std::move(args)));
        }
        std::size_t p = k;
        while (p > 0 && ++idx[p - 1] == prev_end) idx[--p] = 0;
        if (p == 0) break;
      }
    }
    level_start = prev_end;
    all.insert(all.end(), fresh.begin(), fresh.end());
  }
  return all;
}

namespace {

std::vector<FormulaSet> subsets_up_to(const std::vector<Formula>& fs, unsigned max_size) {
  std::vector<FormulaSet> out{{}};
  std::function<void(std::size_t, FormulaSet&)> go = [&](std::size_t from, FormulaSet& cur) {
    if (cur.size() == max_size) return;
    for (std::size_t i = from; i < fs.size(); ++i) {
      cur.insert(fs[i]);
      out.push_back(cur);
      go(i + 1, cur);
      cur.erase(fs[i]);
    }
  };
  FormulaSet cur;
  go(0, cur);
  return out;
}

bool disjoint(const FormulaSet& a, const FormulaSet& b) {
  return std::none_of(a.begin(), a.end(), [&](const Formula& f) { return b.count(f) > 0; });
}

}  // namespace

std::vector<Sequent> exhaustive_suite(const Signature& sig, const SuiteOptions& opt) {
  std::vector<Sequent> out;
  std::set<std::pair<FormulaSet, FormulaSet>> seen;
  auto add = [&](FormulaSet g, FormulaSet d) {
    if (seen.emplace(g, d).second) out.push_back({std::move(g), std::move(d)});
  };
  auto small = formulas_up_to(sig, opt.vars, opt.pair_depth);
  auto sides = subsets_up_to(small, opt.max_side);
  for (const auto& g : sides)
    for (const auto& d : sides)
      if (disjoint(g, d)) add(g, d);
  for (const auto& f : formulas_up_to(sig, opt.vars, opt.depth)) {
    add({}, {f});
    add({f}, {});
  }
  return out;
}

// ---------------------------------------------------------------- flat slice

std::size_t FlatSlice::value_count() const {
  std::size_t n = 0;
  for (ValueSet d : domains) n += count(d);
  return n;
}

std::vector<std::pair<Value, std::size_t>> FlatSlice::entry(
    const PNMatrix& m, ConnId c, const std::vector<std::pair<Value, std::size_t>>& args) const {
  std::vector<Formula> fs;
  std::vector<Value> xs;
  for (const auto& [x, node] : args) {
    if (!has_value(x, node)) throw PreconditionError("argument is not a value of the slice");
    fs.push_back(universe[node]);
    xs.push_back(x);
  }
  auto target = universe.find(Formula::app(c, std::move(fs)));
  std::vector<std::pair<Value, std::size_t>> out;
  if (!target) return out;
  for (Value y : members(m.entry(c, xs) & domains[*target])) out.emplace_back(y, *target);
  return out;
}

FlatSlice flat_slice(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, const Universe& u) {
  FlatSlice s;
  s.universe = u;
  s.designated = m.designated();
  s.domains.resize(u.size());
  s.instance.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    s.instance[i] = is_axiom_instance(u[i], axioms);
    s.domains[i] = s.instance[i] ? m.designated() : m.values();
  }
  return s;
}

ConsequenceResult slice_consequence(const PNMatrix& m, const FlatSlice& slice, const Sequent& s) {
  return consequence_on(m, slice.universe, slice.domains, s, total_refinements(m));
}

// ---------------------------------------------------------------- probe

ProbeResult sharp_semantic_probe(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, unsigned depth,
                                 std::size_t max_universe) {
  if (depth == 0) throw PreconditionError("probe depth must be at least 1");
  const auto& sig = m.signature();
  LookaheadSet theta_set = lookahead_set(axioms);
  std::vector<LookaheadString> theta(theta_set.begin(), theta_set.end());
  LookaheadSet suf_set = suffix_closure(theta_set);
  std::vector<LookaheadString> suf(suf_set.begin(), suf_set.end());

  // Chain-realisable profiles by brute force over Suf(Θ) -> V.
  std::set<std::vector<Value>> profiles;
  std::vector<Value> h(suf.size(), 0);
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == suf.size()) {
      for (std::size_t s = 0; s < suf.size(); ++s) {
        if (suf[s].empty()) continue;
        LookaheadString tail(suf[s].begin() + 1, suf[s].end());
        auto t = static_cast<std::size_t>(std::find(suf.begin(), suf.end(), tail) - suf.begin());
        if (!contains(m.entry(suf[s].front(), {h[t]}), h[s])) return;
      }
      std::vector<Value> f;
      for (const auto& w : theta) f.push_back(h[static_cast<std::size_t>(std::find(suf.begin(), suf.end(), w) - suf.begin())]);
      profiles.insert(std::move(f));
      return;
    }
    for (Value v = 0; v < m.size(); ++v) {
      h[i] = v;
      go(i + 1);
    }
  };
  go(0);

  FormulaSet seed;
  for (const auto& w : theta) seed.insert(apply_string(w, Formula::var(1), sig));
  OracleOptions opt;
  opt.universe_depth = depth - 1;
  opt.max_universe = max_universe;
  OracleUniverse ou = build_oracle_universe(m, axioms, seed, opt);
  auto refs = total_refinements(m);
  AssignmentSearch search(m, ou.universe);

  ProbeResult out;
  for (const auto& f : profiles) {
    bool ok = false;
    for (ValueSet r : refs) {
      std::vector<ValueSet> dom(ou.universe.size(), r);
      for (std::size_t i = 0; i < dom.size(); ++i)
        if (ou.instance[i]) dom[i] &= m.designated();
      for (std::size_t t = 0; t < theta.size(); ++t)
        dom[ou.universe.at(apply_string(theta[t], Formula::var(1), sig))] &= bit(f[t]);
      if (search.solve(std::move(dom))) {
        ok = true;
        break;
      }
    }
    (ok ? out.witnessed : out.refuted).push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------- equivalence checks

VerifyReport verify_equivalence(const PNMatrix& m, const std::vector<SimpleAxiom>& axioms, const PNMatrix& sharp,
                                const std::vector<Sequent>& suite, const OracleOptions& opt, unsigned jobs) {
  auto sharp_refs = total_refinements(sharp);
  std::vector<ConsequenceResult> sharp_res(suite.size());
  std::vector<OracleResult> oracle_res(suite.size());
  // The oracle is monotone in the universe depth, so it starts shallow and only deepens while the
  // strengthened matrix holds and the oracle does not; a resource cap keeps the shallower verdict.
  parallel_for(suite.size(), jobs, [&](std::size_t i) {
    sharp_res[i] = consequence(sharp, suite[i], &sharp_refs);
    OracleOptions step = opt;
    for (unsigned d = 0; d <= opt.universe_depth; ++d) {
      step.universe_depth = d;
      try {
        oracle_res[i] = axiom_consequence_oracle(m, axioms, suite[i], step);
      } catch (const ResourceError&) {
        if (d == 0) throw;
        break;
      }
      if (oracle_res[i].holds || !sharp_res[i].holds) break;
    }
  });
  VerifyReport rep;
  rep.checked = suite.size();
  for (std::size_t i = 0; i < suite.size(); ++i) {
    bool s = sharp_res[i].holds;
    bool o = oracle_res[i].holds;
    if (s && o) {
      ++rep.both_hold;
    } else if (!s && !o) {
      ++rep.both_fail;
    } else if (s) {
      ++rep.inconclusive;
    } else {
      rep.disagreements.push_back({suite[i], *sharp_res[i].countermodel});
    }
  }
  return rep;
}

std::vector<Sequent> compare_consequence(const PNMatrix& a, const PNMatrix& b, const std::vector<Sequent>& suite,
                                         unsigned jobs) {
  auto ra = total_refinements(a);
  auto rb = total_refinements(b);
  std::vector<char> differs(suite.size(), 0);
  parallel_for(suite.size(), jobs, [&](std::size_t i) {
    differs[i] = consequence(a, suite[i], &ra).holds != consequence(b, suite[i], &rb).holds;
  });
  std::vector<Sequent> out;
  for (std::size_t i = 0; i < suite.size(); ++i)
    if (differs[i]) out.push_back(suite[i]);
  return out;
}

}  // namespace pnm
