#include "tfsprime/lexical_index.hpp"

#include <algorithm>

namespace tfsprime {

LexicalIndex::LexicalIndex(const Grammar& g, std::vector<Path> index_paths)
    : paths_(std::move(index_paths)), lexicon_size_(g.lexicon.size()) {
  const auto& sig = *g.sig;
  const std::size_t types = sig.type_count();
  for (std::size_t i = 0; i < lexicon_size_; ++i) all_.push_back(i);
  buckets_.assign(paths_.size(), std::vector<std::vector<std::size_t>>(types));
  for (std::size_t p = 0; p < paths_.size(); ++p) {
    for (std::size_t e = 0; e < lexicon_size_; ++e) {
      const auto& fs = g.lexicon[e].fs;
      auto n = fs.resolve(paths_[p]);
      for (std::size_t t = 0; t < types; ++t) {
        if (!n || sig.meet(fs.node(*n).type, static_cast<TypeId>(t))) buckets_[p][t].push_back(e);
      }
    }
  }
  for (std::size_t e = 0; e < lexicon_size_; ++e) {
    const auto& w = g.lexicon[e].word;
    auto it = std::lower_bound(words_.begin(), words_.end(), w, [](const auto& l, const auto& r) { return l.first < r; });
    if (it == words_.end() || it->first != w) it = words_.insert(it, {w, {}});
    it->second.push_back(e);
  }
}

std::vector<std::size_t> LexicalIndex::lookup(const FeatureStructure& category) const {
  const std::vector<std::size_t>* best = nullptr;
  std::vector<std::size_t> acc;
  bool first = true;
  for (std::size_t p = 0; p < paths_.size(); ++p) {
    auto n = category.resolve(paths_[p]);
    if (!n) continue;
    TypeId t = category.node(*n).type;
    if (t == category.sig().top()) continue;
    const auto& bucket = buckets_[p][static_cast<std::size_t>(t)];
    if (first) {
      best = &bucket;
      first = false;
      continue;
    }
    if (best) {
      acc = *best;
      best = nullptr;
    }
    std::vector<std::size_t> merged;
    std::set_intersection(acc.begin(), acc.end(), bucket.begin(), bucket.end(), std::back_inserter(merged));
    acc = std::move(merged);
  }
  if (first) return all_;
  return best ? *best : acc;
}

const std::vector<std::size_t>& LexicalIndex::by_word(const std::string& word) const {
  static const std::vector<std::size_t> none;
  auto it = std::lower_bound(words_.begin(), words_.end(), word, [](const auto& l, const auto& r) { return l.first < r; });
  if (it == words_.end() || it->first != word) return none;
  return it->second;
}

LexicalIndex build_lexical_index(const Grammar& g, const std::vector<Path>& index_paths) {
  return LexicalIndex(g, index_paths);
}

}  // namespace tfsprime
