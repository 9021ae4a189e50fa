#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tfsprime/feature_structure.hpp"

namespace tfsprime {

/// Syntax error with a 1-based source position.
class ParseError : public GrammarError {
 public:
  ParseError(const std::string& message, int line, int column)
      : GrammarError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

/// Parsed but not yet typed AVM.
///
///   value  := ['#'N] core?          core attaches only without intervening space
///   core   := '[' [type['!'] ','] feat-path value {',' feat-path value} ']'
///           | '<' [value {',' value} ['|' value]] '>'
///           | ident['!'] | "word"['!']
struct AvmAst {
  enum class Kind { Tag, Atom, Word, Bracket, List };
  Kind kind = Kind::Tag;
  std::optional<int> tag;
  std::string type;  // atom / word / explicit bracket type
  bool bound = false;
  std::vector<std::pair<std::vector<std::string>, AvmAst>> features;
  std::vector<AvmAst> items;
  std::vector<AvmAst> tail;  // zero or one element
  int line = 0, column = 0;
};

/// Token stream over grammar text, shared by the AVM and grammar readers.
class AvmLexer {
 public:
  enum class Tok { End, Ident, Word, Tag, Punct, Arrow, Directive };
  struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 0, column = 0;
    bool spaced = true;  // whitespace (or start of input) precedes the token
    std::size_t offset = 0;
  };

  explicit AvmLexer(std::string_view text, int first_line = 1);
  const Token& peek() const { return current_; }
  Token next();
  bool at(std::string_view punct) const { return current_.kind == Tok::Punct && current_.text == punct; }
  void expect(std::string_view punct);
  [[noreturn]] void fail(const std::string& message) const;
  /// Raw text from the current token to the end of its line; the lexer
  /// resumes on the next line.
  std::string rest_of_line();

 private:
  void advance();

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_, column_ = 1;
  Token current_;
};

AvmAst parse_avm(AvmLexer& lexer);
AvmAst parse_avm_text(std::string_view text);
void collect_words(const AvmAst& ast, std::set<std::string>& words);

/// Builds one structure with a root per AST; tags are shared across them.
FeatureStructure build_structure(const HierarchyPtr& sig, const std::vector<const AvmAst*>& roots,
                                 const std::string& context);
FeatureStructure read_avm(const HierarchyPtr& sig, std::string_view text);

/// AVM text for each root, with #n tags for shared nodes and `!` after the
/// type of every node whose binding flag is set.
std::vector<std::string> write_avm_roots(const FeatureStructure& fs);
std::string write_avm(const FeatureStructure& fs);

}  // namespace tfsprime
