#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "pnm/calculus.hpp"
#include "pnm/io.hpp"
#include "pnm/matrix.hpp"
#include "pnm/semantics.hpp"
#include "pnm/sharp.hpp"
#include "pnm/syntax.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return PNM_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "fixtures" / rel; }

/// Seed for randomized tests: PNM_TEST_SEED when set, otherwise a fixed default.
inline std::uint64_t seed() {
  if (const char* s = std::getenv("PNM_TEST_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240601ULL;
}

inline const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"example1", "example2",           "example3", "example3_dni", "example4",
                                              "example5", "example5_explosive", "example6", "example7"};
  return names;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// The formula each golden proof establishes from no premises.
inline std::string golden_goal(const std::string& name) {
  static const std::map<std::string, std::string> goals{
      {"example1", "imp(p1,imp(neg(p1),p2))"},
      {"example2", "imp(p1,imp(neg(p1),neg(p2)))"},
      {"example3", "imp(neg(neg(p1)),p1)"},
      {"example3_dni", "imp(p1,neg(neg(p1)))"},
      {"example4", "or(p1,neg(p1))"},
      {"example5", "imp(sn(or(p1,p2)),and(sn(p1),sn(p2)))"},
      {"example5_explosive", "imp(sn(or(p1,p2)),and(sn(p1),sn(p2)))"},
      {"example6", "imp(neg(box(neg(imp(p1,p2)))),imp(box(p1),neg(box(neg(p2)))))"},
      {"example7", "imp(imp(imp(p1,neg(p1)),p1),p1)"}};
  return goals.at(name);
}

struct Built {
  pnm::SpecFile spec;
  std::vector<pnm::SimpleAxiom> axioms;
  pnm::SharpResult sharp;
};

inline Built build(const std::string& name) {
  Built b;
  b.spec = pnm::load_spec(fixture(name + ".lf"));
  b.axioms = pnm::decompose_all(b.spec.axioms, b.spec.matrix.signature());
  pnm::SharpOptions opt;
  opt.naming = b.spec.naming;
  b.sharp = pnm::sharp_construct(b.spec.matrix, b.axioms, opt);
  return b;
}

inline pnm::Formula f(const std::string& text, const pnm::Signature& sig) { return pnm::parse_formula(text, sig); }

inline pnm::FormulaSet fs(const std::string& text, const pnm::Signature& sig) {
  auto list = pnm::parse_formula_list(text, sig);
  return pnm::FormulaSet(list.begin(), list.end());
}

inline pnm::Sequent seq(const std::string& gamma, const std::string& delta, const pnm::Signature& sig) {
  return pnm::Sequent{fs(gamma, sig), fs(delta, sig)};
}

inline pnm::ValueSet vs(const pnm::PNMatrix& m, const std::vector<std::string>& labels) {
  pnm::ValueSet s = 0;
  for (const auto& l : labels) s |= pnm::bit(*m.find_label(l));
  return s;
}

/// Uniform random formula over p1..p_vars of depth at most `depth`.
inline pnm::Formula random_formula(const pnm::Signature& sig, std::mt19937_64& rng, unsigned vars, unsigned depth,
                                   const std::vector<pnm::ConnId>& conns = {}) {
  std::vector<pnm::ConnId> pool = conns;
  if (pool.empty())
    for (pnm::ConnId c = 0; c < sig.size(); ++c) pool.push_back(c);
  std::uniform_int_distribution<unsigned> var(1, vars);
  if (depth == 0 || pool.empty() || std::bernoulli_distribution(0.3)(rng)) return pnm::Formula::var(var(rng));
  pnm::ConnId c = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  std::vector<pnm::Formula> args;
  for (unsigned i = 0; i < sig.arity(c); ++i) args.push_back(random_formula(sig, rng, vars, depth - 1, pool));
  return pnm::Formula::app(c, std::move(args));
}

// ---------------------------------------------------------------- brute-force oracle
//
// Straight from the definitions: enumerate subsets of values for refinements and every
// assignment of the subformula set for valuations. Only table lookups come from the library.

inline bool oracle_total_on(const pnm::PNMatrix& m, pnm::ValueSet keep) {
  const auto& sig = m.signature();
  for (pnm::ConnId c = 0; c < sig.size(); ++c) {
    for (std::size_t row = 0; row < m.row_count(c); ++row) {
      auto args = m.row_args(c, row);
      bool inside = true;
      for (auto a : args) inside = inside && pnm::contains(keep, a);
      if (inside && (m.entry_at(c, row) & keep) == 0) return false;
    }
  }
  return true;
}

inline std::vector<pnm::ValueSet> oracle_total_refinements(const pnm::PNMatrix& m) {
  std::vector<pnm::ValueSet> total;
  pnm::ValueSet n = pnm::ValueSet{1} << m.size();
  for (pnm::ValueSet s = 1; s < n; ++s)
    if (oracle_total_on(m, s)) total.push_back(s);
  std::vector<pnm::ValueSet> maximal;
  for (auto s : total) {
    bool dominated = false;
    for (auto t : total) dominated = dominated || (t != s && (s & t) == s);
    if (!dominated) maximal.push_back(s);
  }
  return maximal;
}

/// Calls visit(assignment) for every table-respecting assignment of `nodes` (subformula-closed,
/// children first) into values of `keep` that agrees with `fixed`. Stops early when visit returns false.
inline bool oracle_assignments(const pnm::PNMatrix& m, const std::vector<pnm::Formula>& nodes, pnm::ValueSet keep,
                               const std::map<pnm::Formula, pnm::Value>& fixed,
                               const std::function<bool(const std::map<pnm::Formula, pnm::Value>&)>& visit) {
  std::map<pnm::Formula, pnm::Value> a;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == nodes.size()) return visit(a);
    const auto& node = nodes[i];
    for (pnm::Value x = 0; x < m.size(); ++x) {
      if (!pnm::contains(keep, x)) continue;
      auto fx = fixed.find(node);
      if (fx != fixed.end() && fx->second != x) continue;
      if (!node.is_var()) {
        std::vector<pnm::Value> args;
        for (const auto& c : node.args()) args.push_back(a.at(c));
        if (!pnm::contains(m.entry(node.conn(), args), x)) continue;
      }
      a[node] = x;
      if (!go(i + 1)) return false;
      a.erase(node);
    }
    return true;
  };
  return go(0);
}

inline std::vector<pnm::Formula> oracle_nodes(const pnm::FormulaSet& roots) {
  pnm::FormulaSet all;
  for (const auto& r : roots) pnm::collect_subformulas(r, all);
  return {all.begin(), all.end()};  // formula order puts children before parents
}

/// Γ ⊳_M Δ by enumeration over every maximal total refinement.
inline bool oracle_consequence(const pnm::PNMatrix& m, const pnm::Sequent& s) {
  pnm::FormulaSet roots = s.gamma;
  roots.insert(s.delta.begin(), s.delta.end());
  auto nodes = oracle_nodes(roots);
  for (auto keep : oracle_total_refinements(m)) {
    bool counter = false;
    oracle_assignments(m, nodes, keep, {}, [&](const auto& a) {
      for (const auto& g : s.gamma)
        if (!m.is_designated(a.at(g))) return true;
      for (const auto& d : s.delta)
        if (m.is_designated(a.at(d))) return true;
      counter = true;
      return false;
    });
    if (counter) return false;
  }
  return true;
}

/// A_M(x1..xn) by enumeration.
inline pnm::ValueSet oracle_eval(const pnm::PNMatrix& m, const pnm::Formula& a, const std::vector<pnm::Value>& xs) {
  auto nodes = oracle_nodes({a});
  std::map<pnm::Formula, pnm::Value> fixed;
  pnm::ValueSet given = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fixed[pnm::Formula::var(static_cast<unsigned>(i + 1))] = xs[i];
    given |= pnm::bit(xs[i]);
  }
  pnm::ValueSet out = 0;
  for (auto keep : oracle_total_refinements(m)) {
    if ((keep & given) != given) continue;
    oracle_assignments(m, nodes, keep, fixed, [&](const auto& asg) {
      out |= pnm::bit(asg.at(a));
      return true;
    });
  }
  return out;
}

}  // namespace testing
