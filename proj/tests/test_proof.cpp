#include <random>

#include "doctest.h"
#include "pnm/error.hpp"
#include "pnm/proof.hpp"
#include "pnm/verify.hpp"
#include "support.hpp"

using namespace pnm;

namespace {

struct Shape {
  std::size_t goals = 0, closed = 0;
};

void shape_of(const ProofNode& n, Shape& s) {
  if (n.kind == ProofNode::Kind::Leaf) ++s.goals;
  if (n.kind == ProofNode::Kind::Closed) ++s.closed;
  for (const auto& [f, c] : n.children) shape_of(c, s);
}

Shape shape(const ProofTree& t) {
  Shape s;
  shape_of(t.root, s);
  return s;
}

bool mentions(const ProofNode& n, const Formula& f, const Calculus& calc) {
  if (n.kind == ProofNode::Kind::Leaf) return n.goal == f;
  for (const auto& p : calc.find(n.rule)->premises)
    if (substitute(p, n.instance) == f) return true;
  for (const auto& [c, child] : n.children)
    if (mentions(child, f, calc)) return true;
  return false;
}

// Every branch formula introduced by an expansion is needed further down.
bool no_idle_steps(const ProofNode& n, const Calculus& calc) {
  for (const auto& [f, child] : n.children)
    if (!mentions(child, f, calc) || !no_idle_steps(child, calc)) return false;
  return true;
}

Calculus golden_calc(const std::string& name) { return load_calculus(testing::fixture("golden/" + name + ".calc").string()); }
Calculus reference_calc(const std::string& name) {
  return load_calculus(testing::fixture("calculi/" + name + ".reference.calc").string());
}

ProofTree load_proof(const std::string& file, const Signature& sig) {
  return parse_proof(testing::read_file(testing::fixture("proofs/" + file)), sig);
}

Sequent goal_sequent(const std::string& name, const Signature& sig) {
  return testing::seq("", testing::golden_goal(name), sig);
}

}  // namespace

TEST_CASE("hand-built trees check against the rule sets they use") {
  auto c1 = reference_calc("example1");
  auto t1 = load_proof("example1.hand.proof", c1.signature);
  auto r1 = check_proof(t1, c1);
  CHECK_MESSAGE(r1.ok, r1.diagnostic);
  CHECK(shape(t1).goals == 3);
  CHECK(shape(t1).closed == 0);

  auto c6 = reference_calc("example6");
  auto t6 = load_proof("example6.hand.proof", c6.signature);
  auto r6 = check_proof(t6, c6);
  CHECK_MESSAGE(r6.ok, r6.diagnostic);
  CHECK(shape(t6).closed == 1);
  CHECK(shape(t6).goals == 3);
}

TEST_CASE("the checker rejects broken trees") {
  auto c1 = reference_calc("example1");
  auto t = load_proof("example1.hand.proof", c1.signature);

  auto missing = t;
  missing.root.children.pop_back();
  CHECK_FALSE(check_proof(missing, c1).ok);

  auto wrong_goal = t;
  wrong_goal.sequent.delta = testing::fs("p2", c1.signature);
  CHECK_FALSE(check_proof(wrong_goal, c1).ok);

  auto text = testing::read_file(testing::fixture("proofs/example1.hand.proof"));
  auto at = text.find("r_exp [p1 := p1, p2 := imp(p1,imp(neg(p1),p2))]");
  REQUIRE(at != std::string::npos);
  text.replace(at, std::string("r_exp [p1 := p1, p2 := imp(p1,imp(neg(p1),p2))]").size(),
               "r_exp [p1 := p1, p2 := neg(neg(neg(p2)))]");
  auto far = check_proof(parse_proof(text, c1.signature), c1);
  CHECK_FALSE(far.ok);
  CHECK(far.diagnostic.rfind("analyticity", 0) == 0);

  auto renamed = t;
  renamed.root.rule = "no_such_rule";
  CHECK_THROWS_AS(check_proof(renamed, c1), PreconditionError);

  CHECK_THROWS_AS(parse_proof("proof { } => { p1 } banana", c1.signature), ParseError);
}

TEST_CASE("golden proofs are reproduced byte for byte") {
  for (const auto& name : testing::example_names()) {
    auto calc = golden_calc(name);
    auto r = prove(calc, goal_sequent(name, calc.signature));
    INFO(name);
    REQUIRE(r.proof);
    CHECK(check_proof(*r.proof, calc).ok);
    CHECK(no_idle_steps(r.proof->root, calc));
    CHECK(render_text(*r.proof, calc.signature) == testing::read_file(testing::fixture("proofs/" + name + ".proof")));
    CHECK(render_dot(*r.proof, calc.signature) == testing::read_file(testing::fixture("proofs/" + name + ".dot")));
    auto again = parse_proof(render_text(*r.proof, calc.signature), calc.signature);
    CHECK(render_text(again, calc.signature) == render_text(*r.proof, calc.signature));
  }
}

TEST_CASE("search on the hand-written rule sets") {
  for (const auto& [name, closed] : std::vector<std::pair<std::string, std::size_t>>{
           {"example1", 0}, {"example6", 1}, {"example7", 1}}) {
    auto calc = reference_calc(name);
    auto r = prove(calc, goal_sequent(name, calc.signature));
    INFO(name);
    REQUIRE(r.proof);
    CHECK(check_proof(*r.proof, calc).ok);
    CHECK(shape(*r.proof).closed == closed);
    CHECK(no_idle_steps(r.proof->root, calc));
    CHECK(render_text(*r.proof, calc.signature) ==
          testing::read_file(testing::fixture("proofs/" + name + ".reference_search.proof")));
  }
}

TEST_CASE("the modal search proof closes its leftmost branch by contradiction") {
  auto calc = reference_calc("example6");
  auto r = prove(calc, goal_sequent("example6", calc.signature));
  REQUIRE(r.proof);
  const ProofNode* n = &r.proof->root;
  while (n->kind == ProofNode::Kind::Expansion) n = &n->children.front().second;
  CHECK(n->kind == ProofNode::Kind::Closed);
  CHECK(n->rule == "r4");
  CHECK(shape(*r.proof).goals == 3);
}

TEST_CASE("search is deterministic") {
  auto calc = golden_calc("example6");
  auto s = goal_sequent("example6", calc.signature);
  auto a = prove(calc, s), b = prove(calc, s);
  REQUIRE(a.proof);
  REQUIRE(b.proof);
  CHECK(render_text(*a.proof, calc.signature) == render_text(*b.proof, calc.signature));
  CHECK(a.explored == b.explored);
}

TEST_CASE("a goal already in the antecedent is a single leaf") {
  auto calc = golden_calc("example1");
  auto r = prove(calc, testing::seq("p1", "p1", calc.signature));
  REQUIRE(r.proof);
  CHECK(r.proof->root.kind == ProofNode::Kind::Leaf);
  CHECK(render_text(*r.proof, calc.signature) == "proof { p1 } => { p1 }\ngoal p1\n");
}

TEST_CASE("unprovable sequents report a saturated branch") {
  auto calc = golden_calc("example1");
  auto r = prove(calc, testing::seq("p1", "p2", calc.signature));
  CHECK_FALSE(r.proof);
  CHECK(r.saturated.count(testing::f("p1", calc.signature)));
  CHECK_FALSE(r.saturated.count(testing::f("p2", calc.signature)));
  CHECK_THROWS_AS(prove(calc, goal_sequent("example1", calc.signature), ProveLimits{3, 60.0}), ResourceError);
}

TEST_CASE("provability agrees with the strengthened matrix and is monotone") {
  std::mt19937_64 rng(testing::seed() + 40);
  for (const char* name : {"example1", "example2", "example3", "example7"}) {
    auto calc = golden_calc(name);
    auto m = load_spec(testing::fixture(std::string("golden/") + name + ".sharp.lf")).matrix;
    const auto& sig = calc.signature;
    auto suite = exhaustive_suite(sig);
    auto refs = total_refinements(m);
    std::size_t mismatches = 0;
    for (const auto& s : suite) {
      auto r = prove(calc, s);
      if (r.proof.has_value() != consequence(m, s, &refs).holds) ++mismatches;
      if (!r.proof || rng() % 8) continue;
      Sequent wider = s;
      wider.gamma.insert(testing::random_formula(sig, rng, 2, 2));
      wider.delta.insert(testing::random_formula(sig, rng, 2, 2));
      auto w = prove(calc, wider);
      REQUIRE(w.proof);
      CHECK(check_proof(*w.proof, calc).ok);
    }
    INFO(name);
    CHECK(mismatches == 0);
  }
}
