#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pnm/matrix.hpp"
#include "pnm/semantics.hpp"
#include "pnm/syntax.hpp"

namespace pnm {

/// Contents of a matrix description file.
struct SpecFile {
  PNMatrix matrix;
  std::vector<Formula> axioms;
  std::vector<Formula> separators;
  std::vector<Sequent> queries;
  std::vector<LookaheadString> naming;  // optional projection for strengthened value labels
  bool has_separators = false;
};

SpecFile parse_spec(std::string_view text);
SpecFile load_spec(const std::filesystem::path& path);

std::string write_matrix(const PNMatrix& m, const std::vector<std::string>& value_comments = {});
std::string write_spec(const SpecFile& spec);

/// Parses a comma- or whitespace-separated list of formulas (as given on a command line).
std::vector<Formula> parse_formula_list(std::string_view text, const Signature& sig);
/// Parses a dotted string such as "box.neg"; "eps" denotes the empty string.
LookaheadString parse_lookahead(std::string_view text, const Signature& sig);

std::string read_file(const std::filesystem::path& path);

/// Shared low-level reader for the block-structured text formats.
class BlockReader {
 public:
  explicit BlockReader(std::string_view text) : text_(text) {}

  void skip_ws();
  bool at_end();
  bool peek(char c);
  void expect(char c);
  void expect(std::string_view s);
  bool try_consume(std::string_view s);
  /// Label-like word: [A-Za-z0-9_./']+
  std::string word();
  std::size_t position() const { return pos_; }
  Formula formula(const Signature& sig);
  /// Formulas until the closing brace (consumed); commas between formulas are optional.
  std::vector<Formula> formula_block(const Signature& sig);
  /// Words until the closing brace (consumed).
  std::vector<std::string> word_block();
  [[noreturn]] void fail(const std::string& what) const;
  std::string_view text() const { return text_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Signature parse_signature_block(BlockReader& r);  // after the "signature" keyword
std::string write_signature(const Signature& sig);

}  // namespace pnm
