// Acceptance run: one PASS/FAIL line per criterion, details indented above it. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include "invariants.hpp"
#include "pnm/calculus.hpp"
#include "pnm/proof.hpp"

using namespace pnm;
using testing::Built;
using testing::Tally;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Report {
  std::ostringstream detail;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    detail << "  " << (cond ? "ok   " : "FAIL ") << what << "\n";
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(int n, const std::string& title, const std::function<void(Report&)>& body) {
  Report r;
  auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.expect(false, std::string("exception: ") + e.what());
  }
  std::cout << r.detail.str();
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1fs", seconds_since(start));
  std::cout << "criterion " << n << ": " << (r.ok ? "PASS" : "FAIL") << "  " << title << " (" << secs << ")\n"
            << std::flush;
  if (!r.ok) ++failures;
}

std::map<std::string, Built>& built() {
  static std::map<std::string, Built> cache;
  return cache;
}

const Built& example(const std::string& name) {
  auto it = built().find(name);
  if (it == built().end()) it = built().emplace(name, testing::build(name)).first;
  return it->second;
}

PNMatrix reference_table(const std::string& name) {
  return load_spec(testing::fixture("reference/" + name + ".lf")).matrix;
}

Calculus reference_calculus(const std::string& name) {
  return load_calculus(testing::fixture("calculi/" + name + ".reference.calc").string());
}

std::set<std::string> refinement_labels(const PNMatrix& m) {
  std::set<std::string> out;
  for (auto r : total_refinements(m)) out.insert(m.format(r));
  return out;
}

// The same discriminator choice the command line makes without a separators block.
std::optional<Discriminator> discriminator_for(const Built& b) {
  auto base = find_separators(b.spec.matrix, 3);
  if (!base.discriminator) return std::nullopt;
  return transfer_discriminator(b.spec.matrix, *base.discriminator, b.sharp, 3).discriminator;
}

Calculus generated_calculus(const Built& b) {
  auto d = discriminator_for(b);
  if (!d) throw PreconditionError("no discriminator");
  auto c = generate_calculus(b.sharp.matrix, *d);
  c.rules = simplify(strengthen(b.sharp.matrix, c.rules));
  return c;
}

std::size_t closed_count(const ProofNode& n) {
  std::size_t k = n.kind == ProofNode::Kind::Closed;
  for (const auto& [f, c] : n.children) k += closed_count(c);
  return k;
}

const ProofNode& leftmost_leaf(const ProofNode& n) {
  return n.children.empty() ? n : leftmost_leaf(n.children.front().second);
}

}  // namespace

int main() {
  const auto& names = testing::example_names();

  criterion(1, "strengthened tables equal the reference ones up to naming", [&](Report& r) {
    for (const auto& name : names) {
      const auto& m = example(name).sharp.matrix;
      auto ref = reference_table(name);
      auto iso = find_isomorphism(ref, m);
      bool same_labels = iso && [&] {
        for (Value v = 0; v < ref.size(); ++v)
          if (ref.label(v) != m.label((*iso)[v])) return false;
        return true;
      }();
      r.expect(iso.has_value(), name + ": " + std::to_string(m.size()) + " values, isomorphic" +
                                    (iso ? (same_labels ? ", same labels" : ", labels differ") : ""));
    }
  });

  criterion(2, "maximal total refinements match the stated pairs", [&](Report& r) {
    const std::vector<std::pair<std::string, std::set<std::string>>> stated{
        {"example1", {"{00,01,10}", "{11}"}},
        {"example4", {"{011,101,110}", "{111}"}},
        {"example5_explosive", {"{00,01,10}", "{11}"}}};
    for (const auto& [name, want] : stated) {
      auto got = refinement_labels(example(name).sharp.matrix);
      std::string text;
      for (const auto& s : got) text += " " + s;
      r.expect(got == want, name + ":" + text);
    }
  });

  criterion(3, "partition tables match under the reference separators", [&](Report& r) {
    const std::regex line(R"(value (\S+) omega \{(.*)\} mho \{(.*)\})");
    for (const auto& name : names) {
      const auto& m = example(name).sharp.matrix;
      auto calc = reference_calculus(name);
      auto search = discriminator_from(m, calc.separators);
      if (!search.discriminator) {
        r.expect(false, name + ": reference separators leave pairs unseparated");
        continue;
      }
      const auto& d = *search.discriminator;
      auto ref = reference_table(name);
      auto iso = find_isomorphism(ref, m);
      std::istringstream in(testing::read_file(testing::fixture("reference/" + name + ".partitions")));
      std::string text;
      std::size_t rows = 0, matched = 0;
      while (std::getline(in, text)) {
        std::smatch g;
        if (!std::regex_match(text, g, line)) continue;
        ++rows;
        std::string label = g[1].str();
        std::optional<Value> x;
        if (auto p = ref.find_label(label); p && iso)
          x = (*iso)[*p];
        else
          x = m.find_label(label);
        if (!x) continue;
        const auto& sig = m.signature();
        auto omega = parse_formula_list(g[2].str(), sig), mho = parse_formula_list(g[3].str(), sig);
        if (FormulaSet(omega.begin(), omega.end()) == d.omega[*x] && FormulaSet(mho.begin(), mho.end()) == d.mho[*x])
          ++matched;
      }
      r.expect(rows == m.size() && matched == rows,
               name + ": " + std::to_string(matched) + "/" + std::to_string(m.size()) + " rows");
    }
  });

  criterion(4, "generated and reference calculi are mutually derivable and agree with the matrix", [&](Report& r) {
    auto start = Clock::now();
    for (const auto& name : names) {
      const auto& b = example(name);
      const auto& m = b.sharp.matrix;
      auto gen = generated_calculus(b);
      auto ref = reference_calculus(name);
      std::size_t gen_missing = 0, ref_missing = 0;
      for (const auto& rule : ref.rules) gen_missing += !derives(gen, rule);
      for (const auto& rule : gen.rules) ref_missing += !derives(ref, rule);
      auto suite = exhaustive_suite(m.signature());
      auto refs = total_refinements(m);
      std::size_t gen_diff = 0, ref_diff = 0;
      for (const auto& s : suite) {
        bool holds = consequence(m, s, &refs).holds;
        gen_diff += prove(gen, s).proof.has_value() != holds;
        ref_diff += prove(ref, s).proof.has_value() != holds;
      }
      std::ostringstream os;
      os << name << ": " << gen.rules.size() << " generated / " << ref.rules.size() << " reference rules, underivable "
         << gen_missing << " + " << ref_missing << ", suite " << suite.size() << " disagreements " << gen_diff << " + "
         << ref_diff;
      r.expect(gen_missing + ref_missing + gen_diff + ref_diff == 0, os.str());
    }
    double secs = seconds_since(start);
    r.expect(secs < 300.0, "total " + std::to_string(static_cast<int>(secs)) + "s under 300s");
  });

  criterion(5, "golden proofs", [&](Report& r) {
    struct Golden {
      std::string name;
      std::size_t closed;  // exact number of Closed branches
    };
    for (const auto& g : std::vector<Golden>{{"example1", 0}, {"example6", 1}, {"example7", 1}}) {
      auto calc = reference_calculus(g.name);
      auto goal = testing::seq("", testing::golden_goal(g.name), calc.signature);
      auto start = Clock::now();
      auto result = prove(calc, goal, ProveLimits{2'000'000, 10.0});
      double secs = seconds_since(start);
      bool ok = result.proof && check_proof(*result.proof, calc).ok && secs < 10.0;
      std::size_t closed = result.proof ? closed_count(result.proof->root) : 0;
      std::ostringstream os;
      os << g.name << ": " << (result.proof ? "checked proof" : "no proof") << ", " << closed << " closed, "
         << static_cast<int>(secs * 1000) << "ms";
      if (g.name == "example6" && result.proof) {
        const auto& leaf = leftmost_leaf(result.proof->root);
        ok = ok && leaf.kind == ProofNode::Kind::Closed && leaf.rule == "r4";
        os << ", leftmost branch " << (leaf.kind == ProofNode::Kind::Closed ? "closed by " + leaf.rule : "open");
      }
      r.expect(ok && closed == g.closed, os.str());
    }
  });

  criterion(6, "strengthened matrix and axiom oracle never disagree", [&](Report& r) {
    for (const auto& name : names) {
      const auto& b = example(name);
      auto suite = exhaustive_suite(b.spec.matrix.signature());
      auto v = verify_equivalence(b.spec.matrix, b.axioms, b.sharp.matrix, suite);
      std::ostringstream os;
      os << name << ": checked " << v.checked << ", inconclusive " << v.inconclusive << ", disagreements "
         << v.disagreements.size();
      r.expect(v.disagreements.empty() && v.checked == suite.size(), os.str());
    }
  });

  criterion(7, "invariant suites", [&](Report& r) {
    std::mt19937_64 rng(testing::seed() + 700);
    for (const auto& name : names) {
      Tally agree = testing::designation_agreement(example(name), rng, 1000);
      Tally proj = testing::eps_projection(example(name), rng, 1000);
      r.expect(agree.violations == 0 && proj.violations == 0 && proj.hits == 1000,
               name + ": designation agreement " + std::to_string(agree.violations) + "/" +
                   std::to_string(agree.probes) + " violations, projection " + std::to_string(proj.violations) + "/" +
                   std::to_string(proj.probes));
    }
    Tally closure = testing::downward_closure(rng, 300);
    r.expect(closure.violations == 0, "T_M downward closure: " + std::to_string(closure.violations) + "/" +
                                          std::to_string(closure.probes) + " violations");
    Tally dil = testing::dilution(rng, 1000);
    r.expect(dil.violations == 0 && dil.hits > 0, "dilution: " + std::to_string(dil.violations) + " violations over " +
                                                       std::to_string(dil.hits) + " valid sequents");
  });

  criterion(8, "exclusions documented; flat slice checks stand in", [&](Report& r) {
    auto readme = testing::read_file(testing::source_dir() / "README.md");
    r.expect(readme.find("## Exclusions") != std::string::npos, "README has an Exclusions section");
    std::mt19937_64 rng(testing::seed() + 800);
    for (const auto& name : names) {
      Tally t = testing::slice_vs_oracle(name, example(name), rng, 40);
      r.expect(t.violations == 0 && t.hits >= 20, name + ": flat slice vs oracle " + std::to_string(t.violations) +
                                                      " violations over " + std::to_string(t.hits) + " sequents");
    }
  });

  return failures;
}
