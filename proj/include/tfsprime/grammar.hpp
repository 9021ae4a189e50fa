#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfsprime/feature_structure.hpp"

namespace tfsprime {

/// A phrase structure rule.  body.root(0) is the mother, body.root(i) the
/// i-th daughter in declared surface order.
struct Rule {
  std::string name;
  FeatureStructure body;
  std::optional<std::size_t> head;  // 0-based daughter index

  std::size_t arity() const { return body.root_count() - 1; }
  FeatureStructure mother() const { return body.extract(0); }
  FeatureStructure daughter(std::size_t i) const { return body.extract(i + 1); }
};

struct LexicalEntry {
  std::string name;
  FeatureStructure fs;
  std::string word;  // atomic phonology
};

/// `@partial-execute rule=R pos=k`: splice the rules defining daughter k of R.
struct PartialExecution {
  std::string rule;
  std::size_t position = 0;  // 0-based
};

struct Grammar {
  HierarchyPtr sig;
  std::vector<Rule> rules;
  std::vector<LexicalEntry> lexicon;
  FeatureStructure start;
  std::vector<Path> generation_bound;
  std::vector<Path> parsing_bound;
  std::vector<Path> index_paths;
  std::vector<PartialExecution> directives;

  const Rule* find_rule(std::string_view name) const;
  std::optional<std::size_t> rule_index(std::string_view name) const;
};

/// Parses and validates grammar text.  Errors are GrammarError (ParseError for
/// syntax, with line and column).
Grammar load_grammar(std::string_view text);
Grammar load_grammar_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Grammar text that load_grammar() reads back into an isomorphic grammar.
/// Directives are written only when `with_directives` is set.
std::string print_grammar(const Grammar& g, bool with_directives = true);
std::string print_rule(const Rule& r);

/// A rule or lexical entry that a category may resolve to.
struct DefiningMember {
  enum class Kind { Entry, Rule };
  Kind kind;
  std::size_t index;
  bool operator==(const DefiningMember&) const = default;
  auto operator<=>(const DefiningMember&) const = default;
};

/// Lexical entries unifying with `category`, then rules whose mother does.
std::vector<DefiningMember> defining_set(const FeatureStructure& category, const Grammar& g);

/// Phonology of a lexical entry (the `phon` feature).
inline constexpr std::string_view kPhonFeature = "phon";

}  // namespace tfsprime
