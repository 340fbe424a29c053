#include "pnm/calculus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

#include "pnm/error.hpp"
#include "pnm/io.hpp"
#include "pnm/parallel.hpp"
#include "pnm/semantics.hpp"
#include "pnm/verify.hpp"

namespace pnm {

// ---------------------------------------------------------------- separators

ValueSet separator_profile(const PNMatrix& m, const Formula& s, Value x, const std::vector<ValueSet>& refinements) {
  return eval_formula(m, s, {x}, &refinements);
}

namespace {

bool pure_split(ValueSet a, ValueSet b, ValueSet d) {
  if (a == 0 || b == 0) return false;
  bool a_in = (a & ~d) == 0, a_out = (a & d) == 0;
  bool b_in = (b & ~d) == 0, b_out = (b & d) == 0;
  return (a_in && b_out) || (a_out && b_in);
}

Formula p(unsigned i) { return Formula::var(i); }

Formula at(const Formula& s, const Formula& a) { return substitute(s, Substitution{{1, a}}); }

/// Profiles of one candidate at every value.
std::vector<ValueSet> profiles_of(const PNMatrix& m, const Formula& s, const std::vector<ValueSet>& refs) {
  std::vector<ValueSet> out(m.size());
  for (Value x = 0; x < m.size(); ++x) out[x] = separator_profile(m, s, x, refs);
  return out;
}

std::vector<std::pair<Value, Value>> all_pairs(std::size_t n) {
  std::vector<std::pair<Value, Value>> out;
  for (Value x = 0; x < n; ++x)
    for (Value y = x + 1; y < n; ++y) out.emplace_back(x, y);
  return out;
}

/// Assigns to each listed pair the first candidate (in the given order) separating it.
void assign_pairs(const PNMatrix& m, const std::vector<ValueSet>& refs, const std::vector<Formula>& candidates,
                  std::vector<std::pair<Value, Value>>& open, std::vector<std::vector<Formula>>& pair) {
  for (const auto& s : candidates) {
    if (open.empty()) return;
    auto prof = profiles_of(m, s, refs);
    std::erase_if(open, [&](const std::pair<Value, Value>& xy) {
      if (!pure_split(prof[xy.first], prof[xy.second], m.designated())) return false;
      pair[xy.first][xy.second] = pair[xy.second][xy.first] = s;
      return true;
    });
  }
}

/// Iterative deepening over formulas in p1 for the listed pairs.
void search_pairs(const PNMatrix& m, const std::vector<ValueSet>& refs, unsigned max_depth,
                  std::vector<std::pair<Value, Value>>& open, std::vector<std::vector<Formula>>& pair) {
  for (unsigned d = 0; d <= max_depth && !open.empty(); ++d) {
    std::vector<Formula> level;
    for (auto& f : formulas_up_to(m.signature(), 1, d))
      if (f.depth() == d) level.push_back(f);
    std::sort(level.begin(), level.end());
    assign_pairs(m, refs, level, open, pair);
  }
}

Discriminator complete(const PNMatrix& m, const std::vector<ValueSet>& refs, std::vector<std::vector<Formula>> pair) {
  Discriminator d;
  std::size_t n = m.size();
  d.pair = std::move(pair);
  d.family.resize(n);
  d.omega.resize(n);
  d.mho.resize(n);
  for (Value x = 0; x < n; ++x) {
    for (Value y = 0; y < n; ++y)
      if (x != y) d.family[x].insert(d.pair[x][y]);
    for (const auto& s : d.family[x]) {
      ValueSet prof = separator_profile(m, s, x, refs);
      ((prof & ~m.designated()) == 0 ? d.omega[x] : d.mho[x]).insert(s);
    }
  }
  return d;
}

SeparatorSearch finish(const PNMatrix& m, const std::vector<ValueSet>& refs, std::vector<std::vector<Formula>> pair,
                       std::vector<std::pair<Value, Value>> open) {
  SeparatorSearch out;
  if (!open.empty()) {
    out.inseparable = std::move(open);
    return out;
  }
  out.discriminator = complete(m, refs, std::move(pair));
  return out;
}

}  // namespace

bool separates(const PNMatrix& m, const Formula& s, Value x, Value y, const std::vector<ValueSet>& refinements) {
  return pure_split(separator_profile(m, s, x, refinements), separator_profile(m, s, y, refinements), m.designated());
}

FormulaSet Discriminator::separators() const {
  FormulaSet out;
  for (const auto& f : family) out.insert(f.begin(), f.end());
  return out;
}

SeparatorSearch find_separators(const PNMatrix& m, unsigned max_depth) {
  auto refs = total_refinements(m);
  std::vector<std::vector<Formula>> pair(m.size(), std::vector<Formula>(m.size()));
  auto open = all_pairs(m.size());
  search_pairs(m, refs, max_depth, open, pair);
  return finish(m, refs, std::move(pair), std::move(open));
}

SeparatorSearch discriminator_from(const PNMatrix& m, const std::vector<Formula>& candidates) {
  for (const auto& s : candidates)
    for (unsigned v : variables(s))
      if (v != 1) throw PreconditionError("separators may only use p1");
  auto refs = total_refinements(m);
  std::vector<std::vector<Formula>> pair(m.size(), std::vector<Formula>(m.size()));
  auto open = all_pairs(m.size());
  assign_pairs(m, refs, candidates, open, pair);
  return finish(m, refs, std::move(pair), std::move(open));
}

SeparatorSearch transfer_discriminator(const PNMatrix& base, const Discriminator& base_disc, const SharpResult& sharp,
                                       unsigned fallback_depth) {
  const PNMatrix& m = sharp.matrix;
  if (base_disc.size() != base.size()) throw PreconditionError("discriminator does not match the base matrix");
  auto refs = total_refinements(m);
  std::vector<std::vector<Formula>> pair(m.size(), std::vector<Formula>(m.size()));
  std::vector<std::pair<Value, Value>> failed;
  for (auto [x, y] : all_pairs(m.size())) {
    const auto& fx = sharp.profiles[x];
    const auto& fy = sharp.profiles[y];
    std::size_t t = 0;
    while (t < fx.size() && fx[t] == fy[t]) ++t;
    if (t == fx.size()) throw PreconditionError("strengthened values with equal profiles");
    Formula proposal = at(base_disc.pair[fx[t]][fy[t]], apply_string(sharp.theta[t], p(1), m.signature()));
    if (separates(m, proposal, x, y, refs))
      pair[x][y] = pair[y][x] = proposal;
    else
      failed.emplace_back(x, y);
  }
  search_pairs(m, refs, fallback_depth, failed, pair);
  return finish(m, refs, std::move(pair), std::move(failed));
}

std::string validate_discriminator(const PNMatrix& m, const Discriminator& d) {
  std::size_t n = m.size();
  if (d.pair.size() != n || d.family.size() != n || d.omega.size() != n || d.mho.size() != n)
    return "discriminator size differs from the number of values";
  auto refs = total_refinements(m);
  for (auto [x, y] : all_pairs(n)) {
    if (d.pair[x].size() != n || d.pair[y].size() != n) return "malformed pair table";
    const Formula& s = d.pair[x][y];
    if (!s || !(s == d.pair[y][x])) return "no common separator for " + m.label(x) + " and " + m.label(y);
    if (!separates(m, s, x, y, refs))
      return to_string(s, m.signature()) + " does not separate " + m.label(x) + " from " + m.label(y);
  }
  for (Value x = 0; x < n; ++x) {
    FormulaSet fam;
    for (Value y = 0; y < n; ++y)
      if (x != y) fam.insert(d.pair[x][y]);
    if (fam != d.family[x]) return "family of " + m.label(x) + " differs from its pair separators";
    FormulaSet om, mh;
    for (const auto& s : fam) {
      ValueSet prof = separator_profile(m, s, x, refs);
      if (prof == 0) return "empty profile at " + m.label(x);
      if ((prof & ~m.designated()) == 0)
        om.insert(s);
      else if ((prof & m.designated()) == 0)
        mh.insert(s);
      else
        return to_string(s, m.signature()) + " is not pure at " + m.label(x);
    }
    if (om != d.omega[x] || mh != d.mho[x]) return "partition of " + m.label(x) + " is wrong";
  }
  return {};
}

// ---------------------------------------------------------------- generation

namespace {

std::string name_part(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '\'') c = '_';
  return out;
}

std::string labels_of(const PNMatrix& m, const std::vector<Value>& xs) {
  std::string out;
  for (Value x : xs) out += "_" + name_part(m.label(x));
  return out;
}

void insert_at(FormulaSet& out, const FormulaSet& seps, const Formula& a) {
  for (const auto& s : seps) out.insert(at(s, a));
}

}  // namespace

const Rule* Calculus::find(const std::string& name) const {
  for (const auto& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

Calculus generate_calculus(const PNMatrix& m, const Discriminator& d) {
  if (auto err = validate_discriminator(m, d); !err.empty()) throw PreconditionError("invalid discriminator: " + err);
  std::size_t n = m.size();
  if (n > 16) throw ResourceError("calculus generation is limited to 16 values");
  Calculus calc;
  calc.signature = m.signature();
  auto seps = d.separators();
  calc.separators.assign(seps.begin(), seps.end());
  auto emit = [&](std::string name, FormulaSet prem, FormulaSet concl, RuleOrigin o) {
    Rule r{std::move(name), std::move(prem), std::move(concl), o};
    if (!is_trivial(r)) calc.rules.push_back(std::move(r));
  };

  // Exists: for every X, one undesignated separator per x in X and one designated per x outside.
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    std::vector<const FormulaSet*> pools(n);
    bool possible = true;
    for (Value x = 0; x < n; ++x) {
      pools[x] = (mask >> x) & 1U ? &d.mho[x] : &d.omega[x];
      if (pools[x]->empty()) possible = false;
    }
    if (!possible) continue;
    std::vector<Value> xs;
    for (Value x = 0; x < n; ++x)
      if ((mask >> x) & 1U) xs.push_back(x);
    std::vector<FormulaSet::const_iterator> pick(n);
    for (Value x = 0; x < n; ++x) pick[x] = pools[x]->begin();
    std::size_t k = 0;
    while (true) {
      FormulaSet prem, concl;
      for (Value x = 0; x < n; ++x) ((mask >> x) & 1U ? prem : concl).insert(at(*pick[x], p(1)));
      emit("exists" + labels_of(m, xs) + "_" + std::to_string(++k), std::move(prem), std::move(concl),
           RuleOrigin::Exists);
      std::size_t i = n;
      while (i > 0 && ++pick[i - 1] == pools[i - 1]->end()) {
        pick[i - 1] = pools[i - 1]->begin();
        --i;
      }
      if (i == 0) break;
    }
  }

  // Designation.
  for (Value x = 0; x < n; ++x) {
    FormulaSet prem, concl;
    insert_at(prem, d.omega[x], p(1));
    insert_at(concl, d.mho[x], p(1));
    (m.is_designated(x) ? concl : prem).insert(p(1));
    emit("desig" + labels_of(m, {x}), std::move(prem), std::move(concl), RuleOrigin::Designation);
  }

  // Connectives: every tuple and every excluded output.
  const auto& sig = m.signature();
  for (ConnId c = 0; c < sig.size(); ++c) {
    unsigned k = sig.arity(c);
    std::vector<Formula> vars;
    for (unsigned i = 1; i <= k; ++i) vars.push_back(p(i));
    Formula head = Formula::app(c, vars);
    for (std::size_t row = 0; row < m.row_count(c); ++row) {
      auto xs = m.row_args(c, row);
      ValueSet out = m.entry_at(c, row);
      for (Value y = 0; y < n; ++y) {
        if (contains(out, y)) continue;
        FormulaSet prem, concl;
        for (unsigned i = 0; i < k; ++i) {
          insert_at(prem, d.omega[xs[i]], vars[i]);
          insert_at(concl, d.mho[xs[i]], vars[i]);
        }
        insert_at(prem, d.omega[y], head);
        insert_at(concl, d.mho[y], head);
        emit(name_part(sig.name(c)) + labels_of(m, xs) + "_not" + labels_of(m, {y}), std::move(prem),
             std::move(concl), RuleOrigin::Connective);
      }
    }
  }

  // Totality: ⊆-minimal value sets outside T_M.
  auto refs = total_refinements(m);
  std::vector<std::uint32_t> excluded;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (t_m_contains(refs, mask)) continue;
    bool minimal = true;
    for (Value x = 0; x < n && minimal; ++x)
      if (((mask >> x) & 1U) && !t_m_contains(refs, mask & ~(1U << x))) minimal = false;
    if (minimal) excluded.push_back(mask);
  }
  for (std::uint32_t mask : excluded) {
    FormulaSet prem, concl;
    std::vector<Value> xs;
    unsigned i = 0;
    for (Value x = 0; x < n; ++x) {
      if (!((mask >> x) & 1U)) continue;
      xs.push_back(x);
      ++i;
      insert_at(prem, d.omega[x], p(i));
      insert_at(concl, d.mho[x], p(i));
    }
    emit("total" + labels_of(m, xs), std::move(prem), std::move(concl), RuleOrigin::Totality);
  }
  return calc;
}

// ---------------------------------------------------------------- simplification

bool is_trivial(const Rule& r) {
  return std::any_of(r.premises.begin(), r.premises.end(),
                     [&](const Formula& f) { return r.conclusions.count(f) > 0; });
}

namespace {

std::set<unsigned> rule_variables(const Rule& r) {
  std::set<unsigned> out;
  for (const auto* side : {&r.premises, &r.conclusions})
    for (const auto& f : *side) {
      auto v = variables(f);
      out.insert(v.begin(), v.end());
    }
  return out;
}

FormulaSet substitute_all(const FormulaSet& fs, const Substitution& s) {
  FormulaSet out;
  for (const auto& f : fs) out.insert(substitute(f, s));
  return out;
}

/// Maps the pattern formulas into `targets` one at a time, binding variables to variables only.
bool embed(const std::vector<Formula>& patterns, std::size_t i, const FormulaSet& targets, Substitution& binding,
           const std::function<bool(Substitution&)>& then) {
  if (i == patterns.size()) return then(binding);
  for (const auto& t : targets) {
    Substitution b = binding;
    if (!match(patterns[i], t, b)) continue;
    if (!std::all_of(b.begin(), b.end(), [](const auto& kv) { return kv.second.is_var(); })) continue;
    if (embed(patterns, i + 1, targets, b, then)) return true;
  }
  return false;
}

}  // namespace

Rule canonical_rule(const Rule& r) {
  auto vars = rule_variables(r);
  std::vector<unsigned> vs(vars.begin(), vars.end());
  std::vector<unsigned> perm(vs.size());
  std::iota(perm.begin(), perm.end(), 1U);
  auto rename = [&](const std::vector<unsigned>& image) {
    Substitution s;
    for (std::size_t i = 0; i < vs.size(); ++i) s[vs[i]] = p(image[i]);
    Rule out = r;
    out.premises = substitute_all(r.premises, s);
    out.conclusions = substitute_all(r.conclusions, s);
    return out;
  };
  auto key = [](const Rule& x) { return std::tie(x.premises, x.conclusions); };
  Rule best = rename(perm);
  if (vs.size() > 7) return best;
  while (std::next_permutation(perm.begin(), perm.end())) {
    Rule cand = rename(perm);
    if (key(cand) < key(best)) best = std::move(cand);
  }
  return best;
}

bool subsumes(const Rule& general, const Rule& specific) {
  std::vector<Formula> prem(general.premises.begin(), general.premises.end());
  std::vector<Formula> concl(general.conclusions.begin(), general.conclusions.end());
  Substitution b;
  return embed(prem, 0, specific.premises, b, [&](Substitution& after_prem) {
    return embed(concl, 0, specific.conclusions, after_prem, [](Substitution&) { return true; });
  });
}

std::vector<Rule> simplify(const std::vector<Rule>& rules) {
  std::vector<Rule> kept;
  for (const auto& r : rules) {
    if (is_trivial(r)) continue;
    Rule c = canonical_rule(r);
    if (std::find(kept.begin(), kept.end(), c) == kept.end()) kept.push_back(std::move(c));
  }
  std::vector<bool> drop(kept.size(), false);
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = 0; j < kept.size() && !drop[i]; ++j) {
      if (i == j || drop[j] || !subsumes(kept[j], kept[i])) continue;
      // Mutually subsuming rules keep the earlier one.
      if (!subsumes(kept[i], kept[j]) || j < i) drop[i] = true;
    }
  std::vector<Rule> out;
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (!drop[i]) out.push_back(std::move(kept[i]));
  return out;
}

std::vector<Rule> strengthen(const PNMatrix& m, const std::vector<Rule>& rules, unsigned jobs) {
  auto refs = total_refinements(m);
  std::vector<Rule> out(rules);
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    Rule& r = out[i];
    if (!rule_sound(m, r, &refs)) return;
    for (auto* side : {&r.conclusions, &r.premises}) {
      std::vector<Formula> order(side->rbegin(), side->rend());
      for (const auto& f : order) {
        side->erase(f);
        if (!rule_sound(m, r, &refs)) side->insert(f);
      }
    }
  });
  return out;
}

bool rule_sound(const PNMatrix& m, const Rule& r, const std::vector<ValueSet>* refinements) {
  return consequence(m, Sequent{r.premises, r.conclusions}, refinements).holds;
}

std::vector<std::size_t> unsound_rules(const PNMatrix& m, const std::vector<Rule>& rules, unsigned jobs) {
  auto refs = total_refinements(m);
  std::vector<char> bad(rules.size(), 0);
  parallel_for(rules.size(), jobs, [&](std::size_t i) { bad[i] = !rule_sound(m, rules[i], &refs); });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (bad[i]) out.push_back(i);
  return out;
}

std::string origin_name(RuleOrigin o) {
  switch (o) {
    case RuleOrigin::Exists: return "exists";
    case RuleOrigin::Designation: return "designation";
    case RuleOrigin::Connective: return "connective";
    case RuleOrigin::Totality: return "totality";
    case RuleOrigin::User: return "user";
  }
  return "user";
}

// ---------------------------------------------------------------- files

Calculus parse_calculus(std::string_view text) {
  BlockReader r(text);
  Calculus c;
  if (r.word() != "signature") r.fail("a calculus file starts with a signature block");
  c.signature = parse_signature_block(r);
  if (r.try_consume("separators")) {
    c.separators = r.formula_block(c.signature);
    for (const auto& s : c.separators)
      for (unsigned v : variables(s))
        if (v != 1) r.fail("separators may only use p1");
  }
  while (!r.at_end()) {
    if (r.word() != "rule") r.fail("expected a rule");
    Rule rule;
    rule.name = r.word();
    if (c.find(rule.name)) r.fail("duplicate rule " + rule.name);
    r.expect('{');
    r.expect("premises");
    for (auto& f : r.formula_block(c.signature)) rule.premises.insert(std::move(f));
    r.expect("conclusions");
    for (auto& f : r.formula_block(c.signature)) rule.conclusions.insert(std::move(f));
    r.expect('}');
    c.rules.push_back(std::move(rule));
  }
  return c;
}

Calculus load_calculus(const std::string& path) { return parse_calculus(read_file(path)); }

std::string write_calculus(const Calculus& c) {
  const auto& sig = c.signature;
  std::ostringstream os;
  os << write_signature(sig);
  os << "separators {";
  for (const auto& s : c.separators) os << ' ' << to_string(s, sig);
  os << " }\n";
  auto side = [&](const FormulaSet& fs) {
    std::string out = "{";
    for (const auto& f : fs) out += " " + to_string(f, sig);
    return out + " }";
  };
  for (const auto& r : c.rules)
    os << "rule " << r.name << " { premises " << side(r.premises) << " conclusions " << side(r.conclusions)
       << " }\n";
  return os.str();
}

std::string write_partitions(const PNMatrix& m, const Discriminator& d) {
  const auto& sig = m.signature();
  auto side = [&](const FormulaSet& fs) {
    std::string out = "{";
    for (const auto& f : fs) out += " " + to_string(f, sig);
    return out + " }";
  };
  std::ostringstream os;
  for (Value x = 0; x < m.size(); ++x)
    os << "value " << m.label(x) << " omega " << side(d.omega[x]) << " mho " << side(d.mho[x]) << "\n";
  return os.str();
}

}  // namespace pnm
