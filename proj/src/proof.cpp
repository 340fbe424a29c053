#include "pnm/proof.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <sstream>

#include "pnm/error.hpp"
#include "pnm/io.hpp"

namespace pnm {

ProofNode ProofNode::leaf(Formula goal) {
  ProofNode n;
  n.kind = Kind::Leaf;
  n.goal = std::move(goal);
  return n;
}

std::size_t ProofNode::node_count() const {
  std::size_t n = 1;
  for (const auto& [f, c] : children) n += c.node_count();
  return n;
}

namespace {

FormulaSet analytic_universe(const Calculus& calc, const Sequent& s) {
  FormulaSet both = s.gamma;
  both.insert(s.delta.begin(), s.delta.end());
  return s_subformulas(both, calc.separators);
}

std::set<unsigned> rule_vars(const Rule& r) {
  std::set<unsigned> out;
  for (const auto* side : {&r.premises, &r.conclusions})
    for (const auto& f : *side) {
      auto v = variables(f);
      out.insert(v.begin(), v.end());
    }
  return out;
}

FormulaSet instantiate(const FormulaSet& fs, const Substitution& s) {
  FormulaSet out;
  for (const auto& f : fs) out.insert(substitute(f, s));
  return out;
}

// ---------------------------------------------------------------- search

class Prover {
 public:
  Prover(const Calculus& calc, const Sequent& s, const ProveLimits& limits)
      : s_(s), limits_(limits), start_(std::chrono::steady_clock::now()) {
    universe_ = analytic_universe(calc, s);
    for (const auto& f : universe_) by_head_[head(f)].push_back(f);
    for (const auto& r : calc.rules) {
      Pattern p{&r, {r.premises.begin(), r.premises.end()}, {r.conclusions.begin(), r.conclusions.end()}};
      // Larger formulas first: they bind more variables and fail sooner.
      auto larger = [](const Formula& a, const Formula& b) { return a.size() > b.size(); };
      std::stable_sort(p.premises.begin(), p.premises.end(), larger);
      std::stable_sort(p.conclusions.begin(), p.conclusions.end(), larger);
      (p.conclusions.size() == 0 ? closing_ : p.conclusions.size() == 1 ? linear_ : branching_).push_back(std::move(p));
    }
  }

  std::optional<ProofNode> solve(const FormulaSet& state) {
    tick();
    for (const auto& g : s_.delta)
      if (state.count(g)) return ProofNode::leaf(g);
    if (auto it = proven_.find(state); it != proven_.end()) return it->second;

    std::optional<Step> step = first_step(closing_, state);
    if (!step) step = first_step(linear_, state);
    if (!step) step = best_branching(state);
    if (!step) {
      saturated_ = state;
      return std::nullopt;
    }
    ProofNode node;
    node.rule = step->rule->name;
    node.instance = step->instance;
    FormulaSet concl = instantiate(step->rule->conclusions, step->instance);
    node.kind = concl.empty() ? ProofNode::Kind::Closed : ProofNode::Kind::Expansion;
    for (const auto& c : concl) {
      FormulaSet next = state;
      next.insert(c);
      auto child = solve(next);
      if (!child) return std::nullopt;
      node.children.emplace_back(c, std::move(*child));
    }
    proven_.emplace(state, node);
    return node;
  }

  const FormulaSet& saturated() const { return saturated_; }
  std::size_t explored() const { return explored_; }

 private:
  struct Pattern {
    const Rule* rule;
    std::vector<Formula> premises;
    std::vector<Formula> conclusions;
  };
  struct Step {
    const Rule* rule;
    Substitution instance;
  };

  static long head(const Formula& f) { return f.is_var() ? -1 : static_cast<long>(f.conn()); }

  void tick() {
    if (++explored_ > limits_.max_nodes) throw ResourceError("proof search exceeded the node limit");
    if ((explored_ & 0x3FF) == 0) {
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (secs > limits_.max_seconds) throw ResourceError("proof search exceeded the time limit");
    }
  }

  /// Candidates for a pattern inside a pool: same head connective, or everything for a variable.
  template <class Fn>
  bool each_candidate(const Formula& pattern, const FormulaSet& pool, Fn&& fn) {
    if (!pattern.is_var() && &pool == &universe_) {
      auto it = by_head_.find(head(pattern));
      if (it == by_head_.end()) return false;
      for (const auto& f : it->second)
        if (fn(f)) return true;
      return false;
    }
    for (const auto& f : pool)
      if (pattern.is_var() || head(f) == head(pattern))
        if (fn(f)) return true;
    return false;
  }

  /// Calls `found` on every instance with premises in `state` and conclusions in `targets`, none of
  /// them already asserted; stops when `found` returns true.
  template <class Fn>
  bool instances(const Pattern& p, std::size_t i, const FormulaSet& state, const FormulaSet& targets,
                 const Substitution& b, Fn&& found) {
    std::size_t np = p.premises.size();
    if (i == np + p.conclusions.size()) return found(b);
    bool premise = i < np;
    const Formula& pat = premise ? p.premises[i] : p.conclusions[i - np];
    return each_candidate(pat, premise ? state : targets, [&](const Formula& f) {
      Substitution next = b;
      if (!match(pat, f, next)) return false;
      if (!premise && state.count(f)) return false;
      return instances(p, i + 1, state, targets, next, found);
    });
  }

  std::optional<Step> first_step(const std::vector<Pattern>& ps, const FormulaSet& state) {
    for (const auto& p : ps) {
      std::optional<Step> out;
      if (instances(p, 0, state, universe_, {}, [&](const Substitution& b) {
            out = Step{p.rule, b};
            return true;
          }))
        return out;
    }
    return std::nullopt;
  }

  /// A branch that ends at once: a goal, a closing rule, or one linear step to a goal.
  bool immediate(const FormulaSet& state, const Formula& c) {
    if (s_.delta.count(c)) return true;
    FormulaSet next = state;
    next.insert(c);
    auto any = [](const Substitution&) { return true; };
    for (const auto& p : closing_)
      if (instances(p, 0, next, universe_, {}, any)) return true;
    for (const auto& p : linear_)
      if (instances(p, 0, next, s_.delta, {}, any)) return true;
    return false;
  }

  /// The branching instance leaving the fewest branches that do not end at once; ties keep the
  /// fewer branches, then rule order.
  std::optional<Step> best_branching(const FormulaSet& state) {
    std::map<Formula, bool> quick;
    std::optional<Step> best;
    std::size_t best_open = 0, best_width = 0;
    for (const auto& p : branching_) {
      bool done = instances(p, 0, state, universe_, {}, [&](const Substitution& b) {
        FormulaSet concl = instantiate(p.rule->conclusions, b);
        std::size_t open = 0;
        for (const auto& c : concl) {
          auto it = quick.find(c);
          if (it == quick.end()) it = quick.emplace(c, immediate(state, c)).first;
          if (!it->second) ++open;
        }
        if (!best || open < best_open || (open == best_open && concl.size() < best_width)) {
          best = Step{p.rule, b};
          best_open = open;
          best_width = concl.size();
        }
        return best_open == 0 && best_width <= 2;
      });
      if (done) break;
    }
    return best;
  }

  const Sequent& s_;
  ProveLimits limits_;
  std::chrono::steady_clock::time_point start_;
  FormulaSet universe_;
  std::map<long, std::vector<Formula>> by_head_;
  std::vector<Pattern> closing_, linear_, branching_;
  std::map<FormulaSet, ProofNode> proven_;
  FormulaSet saturated_;
  std::size_t explored_ = 0;
};

// Whether f is a leaf goal or an instantiated premise anywhere in the subtree.
bool uses(const ProofNode& n, const Formula& f, const Calculus& calc) {
  if (n.kind == ProofNode::Kind::Leaf) return n.goal == f;
  const Rule* r = calc.find(n.rule);
  for (const auto& p : r->premises)
    if (substitute(p, n.instance) == f) return true;
  for (const auto& [c, child] : n.children)
    if (uses(child, f, calc)) return true;
  return false;
}

// Replaces an expansion by one of its subtrees when that subtree never needs the branch formula;
// the subtree is then already valid in the parent's state.
ProofNode prune(ProofNode n, const FormulaSet& state, const Calculus& calc) {
  if (n.kind != ProofNode::Kind::Expansion) return n;
  for (auto& [f, child] : n.children)
    if (state.count(f) || !uses(child, f, calc)) return prune(std::move(child), state, calc);
  for (auto& [f, child] : n.children) {
    FormulaSet next = state;
    next.insert(f);
    child = prune(std::move(child), next, calc);
  }
  return n;
}

}  // namespace

ProveResult prove(const Calculus& calc, const Sequent& s, const ProveLimits& limits) {
  Prover p(calc, s, limits);
  ProveResult out;
  auto root = p.solve(s.gamma);
  out.explored = p.explored();
  if (root) {
    for (std::size_t size = 0; size != root->node_count();) {
      size = root->node_count();
      root = prune(std::move(*root), s.gamma, calc);
    }
    out.proof = ProofTree{s, std::move(*root)};
  } else {
    out.saturated = p.saturated();
  }
  return out;
}

bool derives(const Calculus& calc, const Rule& r, const ProveLimits& limits) {
  return prove(calc, Sequent{r.premises, r.conclusions}, limits).proof.has_value();
}

// ---------------------------------------------------------------- checking

ProofCheck check_proof(const ProofTree& t, const Calculus& calc) {
  const auto& sig = calc.signature;
  FormulaSet universe = analytic_universe(calc, t.sequent);
  ProofCheck out;
  auto fail = [&](std::string msg) {
    if (out.ok) {
      out.ok = false;
      out.diagnostic = std::move(msg);
    }
  };
  std::function<void(const ProofNode&, const FormulaSet&)> walk = [&](const ProofNode& n, const FormulaSet& state) {
    if (!out.ok) return;
    if (n.kind == ProofNode::Kind::Leaf) {
      if (!n.children.empty()) return fail("leaf with children");
      if (!n.goal || !t.sequent.delta.count(n.goal)) return fail("leaf goal is not in the succedent");
      if (!state.count(n.goal)) return fail("branch lacks " + to_string(n.goal, sig));
      return;
    }
    const Rule* r = calc.find(n.rule);
    if (!r) throw PreconditionError("unknown rule " + n.rule);
    auto vars = rule_vars(*r);
    std::set<unsigned> bound;
    for (const auto& [v, f] : n.instance) bound.insert(v);
    if (bound != vars) throw PreconditionError("instance of " + n.rule + " does not bind exactly its variables");
    FormulaSet prem = instantiate(r->premises, n.instance);
    FormulaSet concl = instantiate(r->conclusions, n.instance);
    for (const auto* side : {&prem, &concl})
      for (const auto& f : *side)
        if (!universe.count(f)) return fail("analyticity: " + to_string(f, sig) + " lies outside the analytic universe");
    for (const auto& f : prem)
      if (!state.count(f)) return fail("premise " + to_string(f, sig) + " of " + n.rule + " is not available");
    if (n.kind == ProofNode::Kind::Closed) {
      if (!concl.empty()) return fail(n.rule + " has conclusions and cannot close a branch");
      if (!n.children.empty()) return fail("closed node with children");
      return;
    }
    if (concl.empty()) return fail(n.rule + " has no conclusions, so the node must be closed");
    FormulaSet kids;
    for (const auto& [f, c] : n.children) kids.insert(f);
    if (kids != concl || kids.size() != n.children.size())
      return fail("children of " + n.rule + " do not match its conclusions");
    for (const auto& [f, c] : n.children) {
      FormulaSet next = state;
      next.insert(f);
      walk(c, next);
    }
  };
  walk(t.root, t.sequent.gamma);
  return out;
}

// ---------------------------------------------------------------- rendering

namespace {

std::string set_text(const FormulaSet& fs, const Signature& sig) {
  std::string out = "{";
  for (const auto& f : fs) out += " " + to_string(f, sig);
  return out + " }";
}

std::string subst_text(const Substitution& s, const Signature& sig) {
  std::string out = "[";
  bool first = true;
  for (const auto& [v, f] : s) {
    out += (first ? "" : ", ") + std::string("p") + std::to_string(v) + " := " + to_string(f, sig);
    first = false;
  }
  return out + "]";
}

void node_text(std::ostringstream& os, const ProofNode& n, const Signature& sig, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (n.kind) {
    case ProofNode::Kind::Leaf:
      os << "goal " << to_string(n.goal, sig) << "\n";
      return;
    case ProofNode::Kind::Closed:
      os << "closed " << n.rule << " " << subst_text(n.instance, sig) << "\n";
      return;
    case ProofNode::Kind::Expansion:
      os << "apply " << n.rule << " " << subst_text(n.instance, sig) << " {\n";
      for (const auto& [f, c] : n.children) {
        os << pad << "  " << to_string(f, sig) << " : ";
        node_text(os, c, sig, indent + 1);
      }
      os << pad << "}\n";
  }
}

ProofNode parse_node(BlockReader& r, const Signature& sig) {
  std::string kw = r.word();
  if (kw == "goal") return ProofNode::leaf(r.formula(sig));
  ProofNode n;
  if (kw == "closed")
    n.kind = ProofNode::Kind::Closed;
  else if (kw == "apply")
    n.kind = ProofNode::Kind::Expansion;
  else
    r.fail("expected goal, closed or apply");
  n.rule = r.word();
  r.expect('[');
  while (!r.peek(']')) {
    Formula v = r.formula(sig);
    if (!v.is_var()) r.fail("instances bind variables");
    r.expect(":=");
    if (!n.instance.emplace(v.var_index(), r.formula(sig)).second) r.fail("variable bound twice");
    if (r.peek(',')) r.expect(',');
  }
  r.expect(']');
  if (n.kind == ProofNode::Kind::Closed) return n;
  r.expect('{');
  while (!r.peek('}')) {
    Formula f = r.formula(sig);
    r.expect(':');
    n.children.emplace_back(f, parse_node(r, sig));
  }
  r.expect('}');
  return n;
}

}  // namespace

std::string render_text(const ProofTree& t, const Signature& sig) {
  std::ostringstream os;
  os << "proof " << set_text(t.sequent.gamma, sig) << " => " << set_text(t.sequent.delta, sig) << "\n";
  node_text(os, t.root, sig, 0);
  return os.str();
}

ProofTree parse_proof(std::string_view text, const Signature& sig) {
  BlockReader r(text);
  if (r.word() != "proof") r.fail("a proof starts with 'proof'");
  ProofTree t;
  for (auto& f : r.formula_block(sig)) t.sequent.gamma.insert(std::move(f));
  r.expect("=>");
  for (auto& f : r.formula_block(sig)) t.sequent.delta.insert(std::move(f));
  t.root = parse_node(r, sig);
  if (!r.at_end()) r.fail("trailing text after the proof");
  return t;
}

std::string render_dot(const ProofTree& t, const Signature& sig) {
  std::ostringstream os;
  os << "digraph proof {\n  node [shape=plaintext];\n";
  std::size_t next = 0;
  std::string root_label;
  for (const auto& f : t.sequent.gamma) root_label += (root_label.empty() ? "" : ", ") + to_string(f, sig);
  if (root_label.empty()) root_label = "\xE2\x88\x85";  // empty set sign
  std::function<void(const ProofNode&, std::size_t)> walk = [&](const ProofNode& n, std::size_t id) {
    if (n.kind == ProofNode::Kind::Closed) {
      std::size_t star = ++next;
      os << "  n" << star << " [label=\"\xE2\x88\x97\"];\n";  // asterisk operator
      os << "  n" << id << " -> n" << star << " [label=\"" << n.rule << "\"];\n";
      return;
    }
    for (const auto& [f, c] : n.children) {
      std::size_t child = ++next;
      os << "  n" << child << " [label=\"" << to_string(f, sig) << "\"];\n";
      os << "  n" << id << " -> n" << child << " [label=\"" << n.rule << "\"];\n";
      walk(c, child);
    }
  };
  os << "  n0 [label=\"" << root_label << "\"];\n";
  walk(t.root, 0);
  os << "}\n";
  return os.str();
}

}  // namespace pnm
