#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfsprime/grammar.hpp"

namespace tfsprime::detail {

/// Directive the grammar reader does not interpret itself.
struct ExtraDirective {
  std::optional<std::size_t> rule;  // rule it follows, if inside rules:
  std::string name;
  std::string args;
  int line = 0;
};

struct ReadResult {
  Grammar grammar;
  std::vector<ExtraDirective> extras;      // header and per-rule annotations
  std::vector<std::string> section_lines;  // raw lines of a diagnostics: section
};

/// Reads the grammar format.  With `allow_extras`, unknown directives and a
/// trailing `diagnostics:` section are returned instead of rejected.
ReadResult read_grammar(std::string_view text, bool allow_extras);

}  // namespace tfsprime::detail
