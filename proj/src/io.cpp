#include "pnm/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "pnm/error.hpp"

namespace pnm {

namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '/' || c == '\'';
}

}  // namespace

// ---------------------------------------------------------------- BlockReader

void BlockReader::skip_ws() {
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (c == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos_;
    } else {
      break;
    }
  }
}

bool BlockReader::at_end() {
  skip_ws();
  return pos_ >= text_.size();
}

bool BlockReader::peek(char c) {
  skip_ws();
  return pos_ < text_.size() && text_[pos_] == c;
}

void BlockReader::expect(char c) {
  if (!peek(c)) fail(std::string("expected '") + c + "'");
  ++pos_;
}

void BlockReader::expect(std::string_view s) {
  if (!try_consume(s)) fail("expected '" + std::string(s) + "'");
}

bool BlockReader::try_consume(std::string_view s) {
  skip_ws();
  if (text_.substr(pos_, s.size()) != s) return false;
  pos_ += s.size();
  return true;
}

std::string BlockReader::word() {
  skip_ws();
  std::size_t start = pos_;
  while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
  if (start == pos_) fail("expected a name or label");
  return std::string(text_.substr(start, pos_ - start));
}

Formula BlockReader::formula(const Signature& sig) {
  skip_ws();
  return parse_formula_at(text_, pos_, sig);
}

std::vector<Formula> BlockReader::formula_block(const Signature& sig) {
  std::vector<Formula> out;
  expect('{');
  while (!peek('}')) {
    out.push_back(formula(sig));
    if (peek(',')) ++pos_;
  }
  expect('}');
  return out;
}

std::vector<std::string> BlockReader::word_block() {
  std::vector<std::string> out;
  expect('{');
  while (!peek('}')) {
    out.push_back(word());
    if (peek(',')) ++pos_;
  }
  expect('}');
  return out;
}

void BlockReader::fail(const std::string& what) const { throw ParseError(what, pos_); }

Signature parse_signature_block(BlockReader& r) {
  Signature sig;
  std::size_t at = r.position();
  for (const auto& w : r.word_block()) {
    auto slash = w.find('/');
    if (slash == std::string::npos || slash + 1 == w.size())
      throw ParseError("connective declarations look like name/arity, got '" + w + "'", at);
    std::string name = w.substr(0, slash);
    unsigned arity = 0;
    for (char c : w.substr(slash + 1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad arity in '" + w + "'", at);
      arity = arity * 10 + static_cast<unsigned>(c - '0');
      if (arity > 8) throw ParseError("arity above 8 is not supported: '" + w + "'", at);
    }
    try {
      sig.add(name, arity);
    } catch (const PreconditionError& e) {
      throw ParseError(e.what(), at);
    }
  }
  return sig;
}

std::string write_signature(const Signature& sig) {
  std::string out = "signature {";
  for (ConnId c = 0; c < sig.size(); ++c) out += " " + sig.name(c) + "/" + std::to_string(sig.arity(c));
  out += " }\n";
  return out;
}

// ---------------------------------------------------------------- spec files

namespace {

struct RawRow {
  std::vector<std::string> args;
  std::vector<std::string> entry;
  std::size_t pos;
};

std::vector<Formula> formulas_until(BlockReader& r, const Signature& sig, std::string_view stop) {
  std::vector<Formula> out;
  while (true) {
    r.skip_ws();
    if (r.try_consume(stop)) return out;
    out.push_back(r.formula(sig));
    if (r.peek(',')) r.expect(',');
  }
}

}  // namespace

SpecFile parse_spec(std::string_view text) {
  BlockReader r(text);
  if (r.word() != "signature") r.fail("a matrix file starts with a signature block");
  Signature sig = parse_signature_block(r);

  std::optional<std::vector<std::string>> values, designated;
  std::map<ConnId, std::vector<RawRow>> tables;
  SpecFile spec;
  std::vector<std::string> naming_words;

  while (!r.at_end()) {
    std::size_t at = r.position();
    std::string kw = r.word();
    if (kw == "det") {
      for (const auto& n : r.word_block()) {
        auto c = sig.find(n);
        if (!c) throw ParseError("det block names unknown connective '" + n + "'", at);
        sig.set_deterministic(*c);
      }
    } else if (kw == "values") {
      if (values) throw ParseError("duplicate values block", at);
      values = r.word_block();
    } else if (kw == "designated") {
      if (designated) throw ParseError("duplicate designated block", at);
      designated = r.word_block();
    } else if (kw == "table") {
      std::string name = r.word();
      auto c = sig.find(name);
      if (!c) throw ParseError("table for unknown connective '" + name + "'", at);
      if (tables.count(*c)) throw ParseError("duplicate table for '" + name + "'", at);
      auto& rows = tables[*c];
      r.expect('{');
      while (!r.peek('}')) {
        RawRow row;
        row.pos = r.position();
        r.expect('(');
        while (!r.peek(')')) {
          row.args.push_back(r.word());
          if (r.peek(',')) r.expect(',');
        }
        r.expect(')');
        r.expect("->");
        row.entry = r.word_block();
        rows.push_back(std::move(row));
      }
      r.expect('}');
    } else if (kw == "axioms") {
      auto fs = r.formula_block(sig);
      spec.axioms.insert(spec.axioms.end(), fs.begin(), fs.end());
    } else if (kw == "separators") {
      auto fs = r.formula_block(sig);
      spec.separators.insert(spec.separators.end(), fs.begin(), fs.end());
      spec.has_separators = true;
    } else if (kw == "query") {
      r.expect('{');
      Sequent s;
      for (auto& f : formulas_until(r, sig, "=>")) s.gamma.insert(f);
      for (auto& f : formulas_until(r, sig, "}")) s.delta.insert(f);
      spec.queries.push_back(std::move(s));
    } else if (kw == "naming") {
      naming_words = r.word_block();
    } else {
      throw ParseError("unknown block '" + kw + "'", at);
    }
  }

  if (!values) throw ParseError("missing values block", text.size());
  ValueSet dmask = 0;
  std::map<std::string, Value> ids;
  for (Value v = 0; v < values->size(); ++v)
    if (!ids.emplace((*values)[v], v).second) throw ParseError("duplicate value '" + (*values)[v] + "'", 0);
  auto lookup = [&](const std::string& l, std::size_t pos) {
    auto it = ids.find(l);
    if (it == ids.end()) throw ParseError("unknown value '" + l + "'", pos);
    return it->second;
  };
  if (designated)
    for (const auto& l : *designated) dmask |= bit(lookup(l, 0));

  PNMatrix m(sig, *values, dmask);
  for (ConnId c = 0; c < sig.size(); ++c) {
    auto it = tables.find(c);
    if (it == tables.end()) throw ParseError("missing table for '" + sig.name(c) + "'", text.size());
    std::vector<bool> seen(m.row_count(c), false);
    for (const auto& row : it->second) {
      if (row.args.size() != sig.arity(c))
        throw ParseError("row of table '" + sig.name(c) + "' has the wrong number of arguments", row.pos);
      std::vector<Value> args;
      for (const auto& a : row.args) args.push_back(lookup(a, row.pos));
      std::size_t idx = m.row_index(args);
      if (seen[idx]) throw ParseError("duplicate row in table '" + sig.name(c) + "'", row.pos);
      seen[idx] = true;
      ValueSet e = 0;
      for (const auto& l : row.entry) e |= bit(lookup(l, row.pos));
      m.set_entry_at(c, idx, e);
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) {
        std::string args;
        for (Value v : m.row_args(c, i)) args += (args.empty() ? "" : ",") + m.label(v);
        throw ParseError("table '" + sig.name(c) + "' is missing row (" + args + ")", text.size());
      }
    }
  }
  spec.matrix = std::move(m);
  for (const auto& w : naming_words) spec.naming.push_back(parse_lookahead(w, sig));
  return spec;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpecFile load_spec(const std::filesystem::path& path) { return parse_spec(read_file(path)); }

std::string write_matrix(const PNMatrix& m, const std::vector<std::string>& value_comments) {
  const auto& sig = m.signature();
  std::string out = write_signature(sig);
  auto det = sig.deterministic();
  if (!det.empty()) {
    out += "det {";
    for (ConnId c : det) out += " " + sig.name(c);
    out += " }\n";
  }
  for (const auto& c : value_comments) out += "# " + c + "\n";
  out += "values {";
  for (const auto& l : m.labels()) out += " " + l;
  out += " }\ndesignated {";
  for (Value v : members(m.designated())) out += " " + m.label(v);
  out += " }\n";
  for (ConnId c = 0; c < sig.size(); ++c) {
    std::size_t rows = m.row_count(c);
    bool wrap = rows > 8;
    out += "table " + sig.name(c) + " {";
    for (std::size_t i = 0; i < rows; ++i) {
      auto args = m.row_args(c, i);
      if (wrap && (args.empty() || i % (rows / m.size()) == 0)) out += "\n ";
      out += " (";
      for (std::size_t k = 0; k < args.size(); ++k) out += (k ? "," : "") + m.label(args[k]);
      out += ")->" + m.format(m.entry_at(c, i));
    }
    out += wrap ? "\n}\n" : " }\n";
  }
  return out;
}

std::string write_spec(const SpecFile& spec) {
  const auto& sig = spec.matrix.signature();
  std::string out = write_matrix(spec.matrix);
  auto block = [&](const char* name, const std::vector<Formula>& fs) {
    out += name;
    out += " {";
    for (const auto& f : fs) out += " " + to_string(f, sig);
    out += " }\n";
  };
  if (!spec.axioms.empty()) block("axioms", spec.axioms);
  if (spec.has_separators) block("separators", spec.separators);
  for (const auto& q : spec.queries) {
    out += "query {";
    for (const auto& f : q.gamma) out += " " + to_string(f, sig);
    out += " =>";
    for (const auto& f : q.delta) out += " " + to_string(f, sig);
    out += " }\n";
  }
  if (!spec.naming.empty()) {
    out += "naming {";
    for (const auto& w : spec.naming) out += " " + to_string(w, sig);
    out += " }\n";
  }
  return out;
}

std::vector<Formula> parse_formula_list(std::string_view text, const Signature& sig) {
  BlockReader r(text);
  std::vector<Formula> out;
  while (!r.at_end()) {
    out.push_back(r.formula(sig));
    if (r.peek(',')) r.expect(',');
  }
  return out;
}

LookaheadString parse_lookahead(std::string_view text, const Signature& sig) {
  LookaheadString w;
  if (text == "eps") return w;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t dot = text.find('.', start);
    if (dot == std::string_view::npos) dot = text.size();
    auto c = sig.find(text.substr(start, dot - start));
    if (!c) throw ParseError("unknown connective in look-ahead string '" + std::string(text) + "'", start);
    if (!sig.in_lookahead_alphabet(*c))
      throw ParseError("'" + sig.name(*c) + "' is not a non-deterministic 1-place connective", start);
    w.push_back(*c);
    start = dot + 1;
  }
  return w;
}

}  // namespace pnm
