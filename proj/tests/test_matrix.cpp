#include <random>

#include "doctest.h"
#include "pnm/error.hpp"
#include "pnm/io.hpp"
#include "pnm/matrix.hpp"
#include "pnm/semantics.hpp"
#include "support.hpp"

using namespace pnm;
using testing::f;
using testing::seq;
using testing::vs;

namespace {

SpecFile base1() { return load_spec(testing::fixture("example1.lf")); }
PNMatrix sharp1() { return load_spec(testing::fixture("golden/example1.sharp.lf")).matrix; }

std::vector<ConnId> only(const Signature& sig, const char* name) { return {sig.require(name)}; }

}  // namespace

TEST_CASE("determinism and totality") {
  auto m = base1().matrix;
  const auto& sig = m.signature();
  auto imp = only(sig, "imp"), neg = only(sig, "neg");
  CHECK(m.is_deterministic(imp));
  CHECK(m.is_total(imp));
  CHECK(m.is_total(neg));
  CHECK_FALSE(m.is_deterministic(neg));
  auto s = sharp1();
  CHECK_FALSE(s.is_total(imp));
  CHECK_FALSE(s.is_deterministic(imp));
  CHECK_FALSE(s.is_deterministic(neg));
}

TEST_CASE("simple refinements") {
  auto m = sharp1();
  CHECK(simple_refinement(m, m.values()) == m);
  auto one = simple_refinement(m, vs(m, {"11"}));
  CHECK(one.size() == 1);
  CHECK(one.is_total());
  CHECK(one.is_deterministic());
  auto three = simple_refinement(m, vs(m, {"00", "01", "10"}));
  CHECK(three.size() == 3);
  CHECK(three.is_total());
  CHECK(simple_refinement(m, 0).size() == 0);
}

TEST_CASE("maximal total refinements") {
  auto m = sharp1();
  auto refs = total_refinements(m);
  CHECK(refs == std::vector<ValueSet>{vs(m, {"00", "01", "10"}), vs(m, {"11"})});
  CHECK(refs == testing::oracle_total_refinements(m));

  auto b = base1().matrix;
  CHECK(total_refinements(b) == std::vector<ValueSet>{b.values()});

  auto e5 = load_spec(testing::fixture("golden/example5_explosive.sharp.lf")).matrix;
  CHECK(total_refinements(e5) == std::vector<ValueSet>{vs(e5, {"00", "01", "10"}), vs(e5, {"11"})});

  for (const auto& name : testing::example_names()) {
    auto s = load_spec(testing::fixture("golden/" + name + ".sharp.lf")).matrix;
    CHECK(total_refinements(s) == testing::oracle_total_refinements(s));
  }
}

TEST_CASE("T_M membership") {
  auto m = sharp1();
  CHECK(t_m_contains(m, 0));
  CHECK_FALSE(t_m_contains(m, vs(m, {"00", "11"})));
  CHECK(t_m_contains(m, vs(m, {"00", "01", "10"})));
  CHECK_FALSE(t_m_contains(m, vs(m, {"01", "11"})));
}

TEST_CASE("eval_formula") {
  auto b = base1().matrix;
  const auto& sig = b.signature();
  auto v0 = *b.find_label("0");
  CHECK(eval_formula(b, f("p1", sig), {v0}) == bit(v0));
  CHECK(eval_formula(b, f("neg(p1)", sig), {v0}) == b.values());

  auto l5 = load_spec(testing::fixture("example7.lf")).matrix;
  const auto& sig7 = l5.signature();
  for (Value x = 0; x < l5.size(); ++x)
    for (Value y = 0; y < l5.size(); ++y)
      CHECK(count(eval_formula(l5, f("imp(neg(p1),imp(p2,p1))", sig7), {x, y})) == 1);

  std::mt19937_64 rng(testing::seed() + 10);
  auto s = sharp1();
  for (int i = 0; i < 200; ++i) {
    auto a = testing::random_formula(sig, rng, 2, 3);
    std::vector<Value> xs{static_cast<Value>(rng() % s.size()), static_cast<Value>(rng() % s.size())};
    REQUIRE(eval_formula(s, a, xs) == testing::oracle_eval(s, a, xs));
  }
}

TEST_CASE("consequence: examples") {
  auto b = base1().matrix;
  const auto& sig = b.signature();
  CHECK(consequence(b, seq("p1, p2", "p2", sig)).holds);
  auto r = consequence(b, seq("p1, neg(p1)", "p2", sig));
  REQUIRE_FALSE(r.holds);
  REQUIRE(r.countermodel);
  const auto& cm = r.countermodel->assignment;
  CHECK(b.label(cm.at(f("p1", sig))) == "1");
  CHECK(b.label(cm.at(f("neg(p1)", sig))) == "1");
  CHECK(b.label(cm.at(f("p2", sig))) == "0");
  CHECK_FALSE(testing::oracle_consequence(b, seq("p1, neg(p1)", "p2", sig)));

  auto s = sharp1();
  CHECK(consequence(s, seq("p1, neg(p1)", "p2", sig)).holds);
  CHECK(testing::oracle_consequence(s, seq("p1, neg(p1)", "p2", sig)));
}

TEST_CASE("consequence agrees with the brute-force oracle") {
  std::mt19937_64 rng(testing::seed() + 11);
  for (const auto& name : {"example1", "example2", "example3", "example6", "example7"}) {
    auto m = load_spec(testing::fixture(std::string("golden/") + name + ".sharp.lf")).matrix;
    const auto& sig = m.signature();
    auto refs = total_refinements(m);
    for (int i = 0; i < 150; ++i) {
      Sequent s;
      for (int k = rng() % 3; k > 0; --k) s.gamma.insert(testing::random_formula(sig, rng, 2, 2));
      for (int k = 1 + rng() % 2; k > 0; --k) s.delta.insert(testing::random_formula(sig, rng, 2, 2));
      auto r = consequence(m, s, &refs);
      INFO(name << " " << to_string(s, sig));
      REQUIRE(r.holds == testing::oracle_consequence(m, s));
      if (!r.holds) {
        REQUIRE(r.countermodel);
        for (const auto& g : s.gamma) CHECK(m.is_designated(r.countermodel->assignment.at(g)));
        for (const auto& d : s.delta) CHECK_FALSE(m.is_designated(r.countermodel->assignment.at(d)));
      }
    }
  }
}

TEST_CASE("empty refinement list makes consequence vacuous") {
  Signature sig;
  sig.add("c", 0);
  PNMatrix m(sig, {"a"}, 0);
  std::vector<Value> none;
  m.set_entry(0, none, 0);
  auto r = consequence(m, Sequent{{}, {Formula::app(0, {})}});
  CHECK(r.holds);
  CHECK(r.vacuous);
}

TEST_CASE("axiom oracle") {
  auto spec = base1();
  const auto& m = spec.matrix;
  const auto& sig = m.signature();
  auto axioms = decompose_all(spec.axioms, sig);
  auto s = seq("p1, neg(p1)", "p2", sig);
  CHECK(axiom_consequence_oracle(m, {}, s).holds == consequence(m, s).holds);
  CHECK(axiom_consequence_oracle(m, axioms, s).holds);

  auto l5 = load_spec(testing::fixture("example7.lf"));
  auto ax7 = decompose_all(l5.axioms, l5.matrix.signature());
  CHECK(axiom_consequence_oracle(l5.matrix, ax7, Sequent{{}, {l5.axioms[0]}}).holds);

  OracleOptions tiny;
  tiny.universe_depth = 3;
  tiny.max_universe = 5;
  CHECK_THROWS_AS(axiom_consequence_oracle(m, axioms, s, tiny), ResourceError);
}

TEST_CASE("expansions and refinements") {
  auto b = base1().matrix;
  ExpansionFunction id{{{"0"}, {"1"}}};
  auto e = expand(b, id);
  CHECK(find_isomorphism(e.matrix, b).has_value());

  ExpansionFunction split{{{"a", "b"}, {"c"}}};
  auto e2 = expand(b, split);
  CHECK(e2.matrix.size() == 3);
  for (Value y = 0; y < e2.matrix.size(); ++y)
    CHECK(e2.matrix.is_designated(y) == b.is_designated(e2.contraction[y]));

  CHECK_THROWS_AS(expand(b, ExpansionFunction{{{"a"}, {"a"}}}), PreconditionError);
  CHECK_THROWS_AS(expand(b, ExpansionFunction{{{"a"}, {}}}), PreconditionError);

  CHECK(refine(b, b) == b);
  auto smaller = b;
  auto neg = b.signature().require("neg");
  smaller.set_entry_at(neg, 0, bit(*b.find_label("1")));
  CHECK(refine(b, smaller) == smaller);
  auto bigger = smaller;
  bigger.set_entry_at(b.signature().require("imp"), 0, b.values());
  CHECK_THROWS_AS(refine(b, bigger), PreconditionError);
}

TEST_CASE("expansion preserves and reflects designation on random images") {
  std::mt19937_64 rng(testing::seed() + 12);
  auto m = sharp1();
  for (int trial = 0; trial < 50; ++trial) {
    ExpansionFunction e;
    int next = 0;
    for (Value x = 0; x < m.size(); ++x) {
      e.images.emplace_back();
      for (int k = 1 + rng() % 3; k > 0; --k) e.images.back().push_back("v" + std::to_string(next++));
    }
    auto ex = expand(m, e);
    for (Value y = 0; y < ex.matrix.size(); ++y) CHECK(ex.matrix.is_designated(y) == m.is_designated(ex.contraction[y]));
    // a refinement of the expansion: the contraction of any assignment respects m
    const auto& sig = m.signature();
    auto a = testing::random_formula(sig, rng, 2, 3);
    auto nodes = testing::oracle_nodes({a});
    int seen = 0;
    testing::oracle_assignments(ex.matrix, nodes, ex.matrix.values(), {}, [&](const auto& asg) {
      for (const auto& n : nodes) {
        if (n.is_var()) continue;
        std::vector<Value> args;
        for (const auto& c : n.args()) args.push_back(ex.contraction[asg.at(c)]);
        CHECK(contains(m.entry(n.conn(), args), ex.contraction[asg.at(n)]));
      }
      return ++seen < 20;
    });
  }
}

TEST_CASE("isomorphism search") {
  auto s = sharp1();
  auto ref = load_spec(testing::fixture("reference/example1.lf")).matrix;
  auto iso = find_isomorphism(ref, s);
  REQUIRE(iso);
  for (Value v = 0; v < ref.size(); ++v) CHECK(ref.label(v) == s.label((*iso)[v]));
  CHECK_FALSE(find_isomorphism(s, base1().matrix));
}
