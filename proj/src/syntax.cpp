#include "pnm/syntax.hpp"

#include <algorithm>
#include <cctype>

#include "pnm/error.hpp"

namespace pnm {

namespace {

bool is_var_name(std::string_view s) {
  if (s.size() < 2 || s[0] != 'p' || s[1] < '1' || s[1] > '9') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!std::isalpha(head) && s[0] != '_') return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

// ---------------------------------------------------------------- Signature

ConnId Signature::add(std::string name, unsigned arity) {
  if (!is_identifier(name)) throw PreconditionError("invalid connective name '" + name + "'");
  if (is_var_name(name)) throw PreconditionError("connective name '" + name + "' clashes with variable syntax");
  if (by_name_.count(name)) throw PreconditionError("duplicate connective '" + name + "'");
  auto id = static_cast<ConnId>(conns_.size());
  by_name_.emplace(name, id);
  conns_.push_back({std::move(name), arity});
  det_.push_back(false);
  return id;
}

void Signature::set_deterministic(ConnId c, bool det) { det_.at(c) = det; }

std::optional<ConnId> Signature::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

ConnId Signature::require(std::string_view name) const {
  auto c = find(name);
  if (!c) throw PreconditionError("unknown connective '" + std::string(name) + "'");
  return *c;
}

std::vector<ConnId> Signature::lookahead_alphabet() const {
  std::vector<ConnId> out;
  for (ConnId c = 0; c < conns_.size(); ++c)
    if (in_lookahead_alphabet(c)) out.push_back(c);
  return out;
}

std::vector<ConnId> Signature::deterministic() const {
  std::vector<ConnId> out;
  for (ConnId c = 0; c < conns_.size(); ++c)
    if (det_[c]) out.push_back(c);
  return out;
}

bool operator==(const Signature& a, const Signature& b) {
  if (a.conns_.size() != b.conns_.size() || a.det_ != b.det_) return false;
  for (std::size_t i = 0; i < a.conns_.size(); ++i)
    if (a.conns_[i].name != b.conns_[i].name || a.conns_[i].arity != b.conns_[i].arity) return false;
  return true;
}

// ---------------------------------------------------------------- Formula

Formula Formula::var(unsigned index) {
  if (index == 0) throw PreconditionError("variable indices start at 1");
  auto n = std::make_shared<Node>(Node{true, index, {}, mix(0x51ed27, index), 0, 1});
  return Formula(std::move(n));
}

Formula Formula::app(ConnId conn, std::vector<Formula> args) {
  std::size_t h = mix(0xa5a5a5, conn);
  unsigned depth = 0;
  unsigned size = 1;
  for (const auto& a : args) {
    h = mix(h, a.hash());
    depth = std::max(depth, a.depth() + 1);
    size += a.size();
  }
  auto n = std::make_shared<Node>(Node{false, conn, std::move(args), h, depth, size});
  return Formula(std::move(n));
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash() || a.size() != b.size()) return false;
  if (a.is_var() != b.is_var() || a.node_->index != b.node_->index) return false;
  return std::equal(a.node_->args.begin(), a.node_->args.end(), b.node_->args.begin(), b.node_->args.end());
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (!a.node_) return std::strong_ordering::less;
  if (!b.node_) return std::strong_ordering::greater;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (a.is_var() != b.is_var()) return a.is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = a.node_->index <=> b.node_->index; c != 0) return c;
  const auto& x = a.node_->args;
  const auto& y = b.node_->args;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (auto c = x[i] <=> y[i]; c != 0) return c;
  return x.size() <=> y.size();
}

// ---------------------------------------------------------------- parse / print

namespace {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Signature& sig, std::size_t pos = 0)
      : text_(text), sig_(sig), pos_(pos) {}

  Formula parse_one(std::size_t& end) {
    Formula f = parse();
    end = pos_;
    return f;
  }

  Formula parse_all() {
    Formula f = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Formula parse() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size()) throw ParseError("expected formula", pos_);
    char c = text_[pos_];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') throw ParseError("malformed token", pos_);
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (is_var_name(name)) {
      unsigned long idx = 0;
      for (char d : name.substr(1)) {
        idx = idx * 10 + static_cast<unsigned>(d - '0');
        if (idx > 1000000) throw ParseError("variable index too large", start);
      }
      return Formula::var(static_cast<unsigned>(idx));
    }
    auto conn = sig_.find(name);
    if (!conn) throw ParseError("unknown connective '" + std::string(name) + "'", start);
    unsigned arity = sig_.arity(*conn);
    std::vector<Formula> args;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      args.push_back(parse());
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        args.push_back(parse());
        skip_ws();
      }
      if (pos_ >= text_.size() || text_[pos_] != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
    }
    if (args.size() != arity)
      throw ParseError("connective '" + std::string(name) + "' expects " + std::to_string(arity) +
                           " argument(s), got " + std::to_string(args.size()),
                       start);
    return Formula::app(*conn, std::move(args));
  }

  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_;
};

void print(const Formula& f, const Signature& sig, std::string& out) {
  if (f.is_var()) {
    out += 'p';
    out += std::to_string(f.var_index());
    return;
  }
  out += sig.name(f.conn());
  if (f.args().empty()) return;
  out += '(';
  bool first = true;
  for (const auto& a : f.args()) {
    if (!first) out += ',';
    first = false;
    print(a, sig, out);
  }
  out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text, const Signature& sig) { return FormulaParser(text, sig).parse_all(); }

Formula parse_formula_at(std::string_view text, std::size_t& pos, const Signature& sig) {
  return FormulaParser(text, sig, pos).parse_one(pos);
}

std::string to_string(const Formula& f, const Signature& sig) {
  std::string out;
  print(f, sig, out);
  return out;
}

std::string to_string(const FormulaSet& fs, const Signature& sig) {
  std::string out = "{";
  bool first = true;
  for (const auto& f : fs) {
    if (!first) out += ", ";
    first = false;
    out += to_string(f, sig);
  }
  return out + "}";
}

// ---------------------------------------------------------------- substitution

Formula substitute(const Formula& a, const Substitution& sigma) {
  if (a.is_var()) {
    auto it = sigma.find(a.var_index());
    return it == sigma.end() ? a : it->second;
  }
  std::vector<Formula> args;
  args.reserve(a.args().size());
  bool changed = false;
  for (const auto& x : a.args()) {
    args.push_back(substitute(x, sigma));
    changed = changed || !(args.back() == x);
  }
  return changed ? Formula::app(a.conn(), std::move(args)) : a;
}

Substitution compose(const Substitution& sigma, const Substitution& tau) {
  Substitution out;
  for (const auto& [v, f] : sigma) out[v] = substitute(f, tau);
  for (const auto& [v, f] : tau)
    if (!sigma.count(v)) out[v] = f;
  return out;
}

bool match(const Formula& pattern, const Formula& target, Substitution& binding) {
  if (pattern.is_var()) {
    auto [it, inserted] = binding.emplace(pattern.var_index(), target);
    return inserted || it->second == target;
  }
  if (target.is_var() || target.conn() != pattern.conn()) return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match(pattern.arg(i), target.arg(i), binding)) return false;
  return true;
}

std::set<unsigned> variables(const Formula& a) {
  std::set<unsigned> out;
  std::vector<Formula> stack{a};
  while (!stack.empty()) {
    Formula f = stack.back();
    stack.pop_back();
    if (f.is_var()) {
      out.insert(f.var_index());
    } else {
      for (const auto& x : f.args()) stack.push_back(x);
    }
  }
  return out;
}

void collect_subformulas(const Formula& a, FormulaSet& out) {
  if (!out.insert(a).second) return;
  if (!a.is_var())
    for (const auto& x : a.args()) collect_subformulas(x, out);
}

FormulaSet subformulas(const Formula& a) {
  FormulaSet out;
  collect_subformulas(a, out);
  return out;
}

FormulaSet subformulas(const FormulaSet& gamma) {
  FormulaSet out;
  for (const auto& f : gamma) collect_subformulas(f, out);
  return out;
}

FormulaSet s_subformulas(const FormulaSet& gamma, const std::vector<Formula>& separators) {
  FormulaSet base = subformulas(gamma);
  FormulaSet out = base;
  for (const auto& s : separators) {
    for (unsigned v : variables(s))
      if (v != 1) throw PreconditionError("separators may only use the variable p1");
    for (const auto& b : base) out.insert(substitute(s, {{1, b}}));
  }
  return out;
}

// ---------------------------------------------------------------- look-ahead strings

Formula apply_string(const LookaheadString& w, const Formula& a, const Signature& sig) {
  Formula out = a;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (!sig.in_lookahead_alphabet(*it))
      throw PreconditionError("'" + sig.name(*it) + "' is not a non-deterministic 1-place connective");
    out = Formula::app(*it, {out});
  }
  return out;
}

std::string to_string(const LookaheadString& w, const Signature& sig) {
  if (w.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += '.';
    out += sig.name(w[i]);
  }
  return out;
}

bool lookahead_less(const LookaheadString& a, const LookaheadString& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::vector<LookaheadString> prefixes(const LookaheadString& w) {
  std::vector<LookaheadString> out;
  for (std::size_t n = 0; n <= w.size(); ++n) out.emplace_back(w.begin(), w.begin() + static_cast<long>(n));
  return out;
}

std::vector<LookaheadString> suffixes(const LookaheadString& w) {
  std::vector<LookaheadString> out;
  for (std::size_t n = 0; n <= w.size(); ++n) out.emplace_back(w.begin() + static_cast<long>(n), w.end());
  return out;
}

LookaheadSet suffix_closure(const LookaheadSet& theta) {
  LookaheadSet out;
  for (const auto& w : theta)
    for (auto& s : suffixes(w)) out.insert(std::move(s));
  return out;
}

// ---------------------------------------------------------------- simple axioms

std::size_t SimpleAxiom::num_vars() const { return base_arity; }

Formula SimpleAxiom::placeholder_image(std::size_t placeholder, const Signature& sig) const {
  if (placeholder < q.size()) return apply_string(q[placeholder].w, Formula::var(q[placeholder].var), sig);
  std::vector<Formula> args;
  for (unsigned j = 1; j <= base_arity; ++j) args.push_back(Formula::var(j));
  return apply_string(r.at(placeholder - q.size()), Formula::app(base, std::move(args)), sig);
}

Formula SimpleAxiom::resubstitute(const Signature& sig) const {
  Substitution sigma;
  for (std::size_t i = 0; i < q.size() + r.size(); ++i)
    sigma[static_cast<unsigned>(i + 1)] = placeholder_image(i, sig);
  return substitute(structure, sigma);
}

namespace {

struct Leaf {
  LookaheadString w;
  Formula core;  // a variable or the r-term's ©(x1..xk)
};

Leaf strip(const Formula& f, const Signature& sig) {
  Leaf leaf;
  Formula cur = f;
  while (!cur.is_var() && sig.in_lookahead_alphabet(cur.conn())) {
    leaf.w.push_back(cur.conn());
    cur = cur.arg(0);
  }
  leaf.core = cur;
  return leaf;
}

// Replace maximal non-Σd subtrees with fresh placeholders, sharing identical subtrees.
Formula skeleton(const Formula& f, const Signature& sig, std::vector<Formula>& leaves) {
  if (!f.is_var() && sig.is_deterministic(f.conn())) {
    std::vector<Formula> args;
    for (const auto& a : f.args()) args.push_back(skeleton(a, sig, leaves));
    return Formula::app(f.conn(), std::move(args));
  }
  auto it = std::find(leaves.begin(), leaves.end(), f);
  if (it == leaves.end()) {
    leaves.push_back(f);
    it = leaves.end() - 1;
  }
  return Formula::var(static_cast<unsigned>(it - leaves.begin()) + 1);
}

}  // namespace

SimpleAxiom decompose_simple(const Formula& b, const Signature& sig) {
  std::vector<Formula> raw_leaves;
  Formula shape = skeleton(b, sig, raw_leaves);
  std::vector<Leaf> leaves;
  for (const auto& l : raw_leaves) leaves.push_back(strip(l, sig));

  auto fail = [&](const std::string& why) -> SimpleAxiom {
    throw NotSimpleError("axiom " + to_string(b, sig) + " is not simple: " + why);
  };

  // Identify the r-term core, if any.
  std::optional<Formula> core;
  for (const auto& l : leaves) {
    if (l.core.is_var()) continue;
    if (core && !(*core == l.core)) return fail("r-terms disagree on their base term");
    core = l.core;
  }

  std::vector<unsigned> rename;  // rename[j-1] = original variable index of p_j
  SimpleAxiom ax;
  ax.source = b;
  std::set<unsigned> vars = variables(b);
  if (core) {
    ax.base = core->conn();
    ax.base_arity = sig.arity(ax.base);
    ax.base_forced = true;
    std::set<unsigned> seen;
    for (const auto& a : core->args()) {
      if (!a.is_var()) return fail("r-term arguments must be variables");
      if (!seen.insert(a.var_index()).second) return fail("r-term arguments must be distinct");
      rename.push_back(a.var_index());
    }
    for (unsigned v : vars)
      if (!seen.count(v)) return fail("variable p" + std::to_string(v) + " does not occur in the r-term");
  } else {
    std::optional<ConnId> best;
    for (ConnId c = 0; c < sig.size(); ++c) {
      if (sig.arity(c) < vars.size()) continue;
      if (!best || sig.arity(c) < sig.arity(*best)) best = c;
    }
    if (!best) return fail("no connective has enough arguments to host its variables");
    ax.base = *best;
    ax.base_arity = sig.arity(*best);
    rename.assign(vars.begin(), vars.end());
    // Unused slots get fresh indices beyond every variable in the axiom.
    unsigned fresh = vars.empty() ? 1 : *vars.rbegin() + 1;
    while (rename.size() < ax.base_arity) rename.push_back(fresh++);
  }

  auto position_of = [&](unsigned original) {
    return static_cast<unsigned>(std::find(rename.begin(), rename.end(), original) - rename.begin()) + 1;
  };

  // Placeholders: q's first (in leaf order), then r's.
  Substitution to_placeholder;
  std::vector<std::size_t> q_leaves, r_leaves;
  for (std::size_t i = 0; i < leaves.size(); ++i) (leaves[i].core.is_var() ? q_leaves : r_leaves).push_back(i);
  for (std::size_t i : q_leaves) {
    to_placeholder[static_cast<unsigned>(i + 1)] = Formula::var(static_cast<unsigned>(ax.q.size() + 1));
    ax.q.push_back({leaves[i].w, position_of(leaves[i].core.var_index())});
  }
  for (std::size_t i : r_leaves) {
    to_placeholder[static_cast<unsigned>(i + 1)] =
        Formula::var(static_cast<unsigned>(q_leaves.size() + ax.r.size() + 1));
    ax.r.push_back(leaves[i].w);
  }
  ax.structure = substitute(shape, to_placeholder);

  Substitution canon;
  for (std::size_t j = 0; j < rename.size(); ++j) canon[rename[j]] = Formula::var(static_cast<unsigned>(j + 1));
  ax.canonical = substitute(b, canon);
  if (!(ax.resubstitute(sig) == ax.canonical)) return fail("internal round-trip mismatch");
  return ax;
}

LookaheadSet lookahead_set(const std::vector<SimpleAxiom>& axioms) {
  LookaheadSet theta{{}};
  for (const auto& ax : axioms) {
    for (const auto& q : ax.q)
      for (auto& p : prefixes(q.w)) theta.insert(std::move(p));
    for (const auto& u : ax.r)
      for (auto& p : prefixes(u)) theta.insert(std::move(p));
  }
  return theta;
}

}  // namespace pnm
