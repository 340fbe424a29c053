#include <algorithm>

#include "doctest.h"
#include "pnm/error.hpp"
#include "pnm/io.hpp"
#include "pnm/sharp.hpp"
#include "pnm/verify.hpp"
#include "support.hpp"

using namespace pnm;
using testing::f;
using testing::vs;

namespace {

ValueSet entry(const PNMatrix& m, const char* conn, std::initializer_list<const char*> args) {
  std::vector<Value> ids;
  for (auto a : args) ids.push_back(*m.find_label(a));
  return m.entry(m.signature().require(conn), ids);
}

std::vector<Value> profile(const PNMatrix& base, std::initializer_list<const char*> labels) {
  std::vector<Value> p;
  for (auto l : labels) p.push_back(*base.find_label(l));
  return p;
}

bool has(const std::vector<std::vector<Value>>& list, const std::vector<Value>& p) {
  return std::find(list.begin(), list.end(), p) != list.end();
}

}  // namespace

TEST_CASE("explosion example tables") {
  auto b = testing::build("example1");
  const auto& m = b.sharp.matrix;
  CHECK(m.labels() == std::vector<std::string>{"00", "01", "10", "11"});
  CHECK(m.designated() == vs(m, {"10", "11"}));
  CHECK(entry(m, "neg", {"01"}) == vs(m, {"10"}));
  CHECK(entry(m, "neg", {"10"}) == vs(m, {"00", "01"}));
  CHECK(entry(m, "neg", {"11"}) == vs(m, {"11"}));
  CHECK(entry(m, "imp", {"11", "00"}) == 0);
  CHECK(entry(m, "imp", {"10", "00"}) == vs(m, {"00", "01"}));
  CHECK(b.sharp.theta.size() == 2);
}

TEST_CASE("double negation elimination excludes four profiles") {
  auto b = testing::build("example3");
  const auto& m = b.sharp.matrix;
  CHECK(m.labels() == std::vector<std::string>{"010", "101", "110", "111"});
  CHECK(entry(m, "neg", {"111"}) == vs(m, {"110", "111"}));
  for (const char* gone : {"000", "001", "100", "011"}) CHECK_FALSE(m.find_label(gone));
}

TEST_CASE("modal example under the three-string naming") {
  auto b = testing::build("example6");
  const auto& m = b.sharp.matrix;
  CHECK(m.labels() == std::vector<std::string>{"000", "001", "100", "110"});
  CHECK(entry(m, "box", {"110"}) == vs(m, {"100", "110"}));
  CHECK(entry(m, "imp", {"110", "001"}) == vs(m, {"001"}));
  CHECK(b.sharp.theta.size() == 7);
}

TEST_CASE("value naming") {
  auto b4 = testing::build("example4");
  CHECK(b4.sharp.matrix.find_label("011"));
  auto b5 = testing::build("example5");
  CHECK(b5.sharp.matrix.labels() == std::vector<std::string>{"00", "01", "10", "11"});
  for (std::size_t v = 0; v < b5.sharp.profiles.size(); ++v)
    CHECK(b5.sharp.profiles[v].front() == b5.sharp.profiles[v].back());  // f(eps) = f(sn.sn)
  auto b7 = testing::build("example7");
  CHECK(b7.sharp.theta.size() == 1);
  CHECK(b7.sharp.matrix.labels() == std::vector<std::string>{"0", "1/2", "1"});
}

TEST_CASE("no axioms gives an isomorphic copy") {
  for (const char* name : {"example1", "example6", "example7"}) {
    auto spec = load_spec(testing::fixture(std::string(name) + ".lf"));
    auto r = sharp_construct(spec.matrix, {});
    CHECK(r.theta.size() == 1);
    CHECK(find_isomorphism(r.matrix, spec.matrix).has_value());
    auto suite = exhaustive_suite(spec.matrix.signature(), SuiteOptions{2, 1, 1, 1});
    CHECK(verify_equivalence(spec.matrix, {}, r.matrix, suite).disagreements.empty());
  }
}

TEST_CASE("preconditions") {
  auto spec = load_spec(testing::fixture("example4.lf"));
  const auto& sig = spec.matrix.signature();
  CHECK_THROWS_AS(decompose_all({f("imp(neg(and(p1,neg(p1))),circ(p1))", sig)}, sig), NotSimpleError);

  auto bad = parse_spec(R"(signature { imp/2 neg/1 } det { imp } values { 0 1 } designated { 1 }
table imp { (0,0)->{0,1} (0,1)->{1} (1,0)->{0} (1,1)->{1} }
table neg { (0)->{1} (1)->{0} })");
  CHECK_THROWS_AS(deterministic_witness(bad.matrix), PreconditionError);
}

TEST_CASE("strengthened tables refine the expansion and respect shifts") {
  for (const auto& name : testing::example_names()) {
    auto b = testing::build(name);
    const auto& base = b.spec.matrix;
    const auto& m = b.sharp.matrix;
    const auto& sig = m.signature();
    const auto& theta = b.sharp.theta;
    INFO(name);
    for (ConnId c = 0; c < sig.size(); ++c) {
      for (std::size_t row = 0; row < m.row_count(c); ++row) {
        auto args = m.row_args(c, row);
        std::vector<Value> projected;
        for (auto a : args) projected.push_back(b.sharp.contraction(a));
        ValueSet allowed = base.entry(c, projected);
        for (Value g : members(m.entry_at(c, row))) {
          CHECK(contains(allowed, b.sharp.contraction(g)));
          if (!sig.in_lookahead_alphabet(c)) continue;
          for (std::size_t i = 0; i < theta.size(); ++i) {
            LookaheadString uc = theta[i];
            uc.push_back(c);
            auto j = std::find(theta.begin(), theta.end(), uc);
            if (j == theta.end()) continue;
            CHECK(b.sharp.profiles[g][i] == b.sharp.profiles[args[0]][static_cast<std::size_t>(j - theta.begin())]);
          }
        }
      }
    }
    for (Value v = 0; v < m.size(); ++v) CHECK(m.is_designated(v) == base.is_designated(b.sharp.contraction(v)));
  }
}

TEST_CASE("incremental and batch strengthening agree") {
  auto stage1 = testing::build("example3");
  auto dni = load_spec(testing::fixture("example3_dni.lf"));
  CHECK(dni.matrix == stage1.sharp.matrix);
  auto stage2 = testing::build("example3_dni");
  auto batch = testing::build("example3_batch");
  CHECK(find_isomorphism(stage2.sharp.matrix, batch.sharp.matrix).has_value());
  auto suite = exhaustive_suite(stage2.sharp.matrix.signature());
  CHECK(compare_consequence(stage2.sharp.matrix, batch.sharp.matrix, suite).empty());
}

TEST_CASE("flat slice") {
  auto spec = load_spec(testing::fixture("example1.lf"));
  const auto& m = spec.matrix;
  const auto& sig = m.signature();
  auto axioms = decompose_all(spec.axioms, sig);
  Universe u(FormulaSet{spec.axioms[0], f("p2", sig)});

  auto plain = flat_slice(m, {}, u);
  CHECK(plain.value_count() == m.size() * u.size());

  auto slice = flat_slice(m, axioms, u);
  auto node = u.at(spec.axioms[0]);
  CHECK(slice.instance[node]);
  CHECK_FALSE(slice.has_value(*m.find_label("0"), node));
  CHECK(slice.has_value(*m.find_label("1"), node));

  auto s = testing::seq("p1, neg(p1)", "p2", sig);
  Universe u2(FormulaSet{f("imp(p1,imp(neg(p1),p2))", sig)});
  auto slice2 = flat_slice(m, axioms, u2);
  CHECK(slice_consequence(m, slice2, s).holds);
  CHECK(slice_consequence(m, flat_slice(m, {}, u2), s).holds == false);
}

TEST_CASE("semantic probe") {
  auto b1 = testing::build("example1");
  auto p1 = sharp_semantic_probe(b1.spec.matrix, b1.axioms, 2);
  CHECK(p1.witnessed.size() == 4);
  CHECK(p1.refuted.empty());

  auto b3 = testing::build("example3");
  auto p3 = sharp_semantic_probe(b3.spec.matrix, b3.axioms, 3);
  CHECK_FALSE(has(p3.witnessed, profile(b3.spec.matrix, {"0", "1", "1"})));
  CHECK(has(p3.refuted, profile(b3.spec.matrix, {"0", "1", "1"})));
  // every strengthened value is a witnessed profile
  for (const auto& p : b3.sharp.profiles) CHECK(has(p3.witnessed, p));

  auto none = sharp_semantic_probe(b1.spec.matrix, {}, 1);
  CHECK(none.witnessed.size() == b1.spec.matrix.size());
  CHECK_THROWS_AS(sharp_semantic_probe(b1.spec.matrix, b1.axioms, 0), PreconditionError);
}

TEST_CASE("verify_equivalence on the explosion example") {
  auto b = testing::build("example1");
  auto suite = exhaustive_suite(b.spec.matrix.signature());
  auto report = verify_equivalence(b.spec.matrix, b.axioms, b.sharp.matrix, suite);
  CHECK(report.checked == suite.size());
  CHECK(report.disagreements.empty());
  CHECK(report.both_hold + report.both_fail + report.inconclusive == report.checked);
}

TEST_CASE("exhaustive suite shape") {
  auto sig = load_spec(testing::fixture("example1.lf")).matrix.signature();
  auto suite = exhaustive_suite(sig);
  CHECK(suite.size() == 1017);
  for (const auto& s : suite) {
    CHECK(s.gamma.size() <= 2);
    CHECK(s.delta.size() <= 2);
    for (const auto& g : s.gamma) CHECK(s.delta.count(g) == 0);
  }
  CHECK(formulas_up_to(sig, 2, 0).size() == 2);
  CHECK(formulas_up_to(sig, 2, 1).size() == 2 + 4 + 2);
}
