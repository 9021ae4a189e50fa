#pragma once

#include <vector>

#include "tfsprime/grammar.hpp"

namespace tfsprime {

/// Constant-time lexical access keyed on the types found at a few index
/// paths (by default phon and cont|nucleus).
///
/// For every index path and every type t of the hierarchy the index stores
/// the entries whose value at that path is compatible with t, plus entries
/// that lack the path.  A lookup intersects the lists selected by the
/// category's own types, so it never drops an entry that could unify.
class LexicalIndex {
 public:
  LexicalIndex() = default;
  LexicalIndex(const Grammar& g, std::vector<Path> index_paths);

  /// Candidate entries for `category` (indices into the lexicon, ascending).
  std::vector<std::size_t> lookup(const FeatureStructure& category) const;
  /// Entries whose phonology is exactly `word`.
  const std::vector<std::size_t>& by_word(const std::string& word) const;

  const std::vector<Path>& paths() const { return paths_; }
  std::size_t size() const { return lexicon_size_; }

 private:
  std::vector<Path> paths_;
  // buckets_[p][t]: entries compatible with type t at paths_[p].
  std::vector<std::vector<std::vector<std::size_t>>> buckets_;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> words_;  // sorted
  std::size_t lexicon_size_ = 0;
  std::vector<std::size_t> all_;
};

LexicalIndex build_lexical_index(const Grammar& g, const std::vector<Path>& index_paths);

}  // namespace tfsprime
