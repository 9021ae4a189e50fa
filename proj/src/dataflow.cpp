#include <algorithm>
#include <functional>

#include "tfsprime/priming.hpp"

namespace tfsprime {

std::string mode_name(Mode m) { return m == Mode::Generation ? "generate" : "parse"; }

Mode parse_mode(std::string_view text) {
  if (text == "generate" || text == "generation") return Mode::Generation;
  if (text == "parse" || text == "parsing") return Mode::Parsing;
  throw GrammarError("unknown mode '" + std::string(text) + "' (expected generate or parse)");
}

namespace {

// Bare mother, or the mother after every daughter has been narrowed by what
// its defining members have in common.
FeatureStructure summarize_rule(const Grammar& g, const Rule& rule, const std::vector<FeatureStructure>& previous) {
  FeatureStructure body = strip_bindings(rule.body);
  for (std::size_t i = 0; i < rule.arity(); ++i) {
    FeatureStructure cat = body.extract(i + 1);
    std::vector<FeatureStructure> found;
    for (const auto& e : g.lexicon)
      if (auto u = unify(cat, e.fs)) found.push_back(*u);
    for (const auto& s : previous)
      if (auto u = unify(cat, s)) found.push_back(*u);
    auto common = generalize_all(found);
    if (!common) return strip_bindings(rule.mother());
    auto next = unify_root(body, i + 1, *common);
    if (!next) return strip_bindings(rule.mother());
    body = *next;
  }
  return strip_bindings(body.extract(0));
}

std::size_t max_clique(const std::vector<std::vector<char>>& compatible) {
  const std::size_t n = compatible.size();
  std::size_t best = 0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    best = std::max(best, chosen.size());
    if (chosen.size() + (n - from) <= best) return;
    for (std::size_t v = from; v < n; ++v) {
      bool fits = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t u) { return compatible[u][v] != 0; });
      if (!fits) continue;
      chosen.push_back(v);
      grow(v + 1);
      chosen.pop_back();
    }
  };
  grow(0);
  return best;
}

// The values a run-time instantiation fixes: whatever lies at or below the
// given paths.  Nodes that only lead there get the most general type that
// carries their arcs.
FeatureStructure project(const FeatureStructure& fs, const std::vector<Path>& paths) {
  FeatureStructure r = strip_bindings(restrict(fs, paths));
  const auto& sig = r.sig();
  std::vector<char> kept(r.node_count(), 0);
  std::function<void(NodeId)> keep = [&](NodeId n) {
    if (kept[n]) return;
    kept[n] = 1;
    for (const auto& [f, c] : r.node(n).arcs) keep(c);
  };
  for (const auto& p : paths)
    if (auto n = r.resolve(p)) keep(*n);
  std::vector<FeatureStructure::Node> nodes = r.nodes();
  for (NodeId n = 0; n < nodes.size(); ++n) {
    if (kept[n]) continue;
    TypeId t = sig.top();
    for (const auto& [f, c] : nodes[n].arcs) t = sig.meet(t, sig.introducer(f)).value_or(t);
    nodes[n].type = t;
  }
  return FeatureStructure(r.sig_ptr(), std::move(nodes), r.roots());
}

}  // namespace

std::vector<FeatureStructure> recurse_summaries(const Grammar& g, std::size_t depth) {
  std::vector<FeatureStructure> current;
  for (const auto& r : g.rules) current.push_back(strip_bindings(r.mother()));
  std::vector<char> settled(g.rules.size(), 0);
  for (std::size_t round = 0; round < depth; ++round) {
    std::vector<FeatureStructure> next;
    bool changed = false;
    for (std::size_t r = 0; r < g.rules.size(); ++r) {
      next.push_back(summarize_rule(g, g.rules[r], current));
      settled[r] = canonical(next.back(), false) == canonical(current[r], false);
      changed = changed || !settled[r];
    }
    current = std::move(next);
    if (!changed) return current;
  }
  for (std::size_t r = 0; r < g.rules.size(); ++r)
    if (!settled[r]) current[r] = strip_bindings(g.rules[r].mother());
  return current;
}

DataflowAnalyzer::DataflowAnalyzer(const Grammar& g, Mode mode, std::size_t summary_depth)
    : g_(&g), mode_(mode), summaries_(recurse_summaries(g, summary_depth)) {
  for (const auto& e : g.lexicon) lexical_.push_back(mark_type_implied(e.fs));
}

std::vector<DefiningMember> DataflowAnalyzer::defining(const FeatureStructure& category) const {
  std::vector<DefiningMember> out;
  for (std::size_t i = 0; i < lexical_.size(); ++i)
    if (unify(category, lexical_[i])) out.push_back({DefiningMember::Kind::Entry, i});
  for (std::size_t i = 0; i < summaries_.size(); ++i)
    if (unify(category, summaries_[i])) out.push_back({DefiningMember::Kind::Rule, i});
  return out;
}

FeatureStructure DataflowAnalyzer::member_structure(const DefiningMember& m) const {
  if (m.kind == DefiningMember::Kind::Entry) return lexical_[m.index];
  return mark_type_implied(summaries_[m.index]);
}

std::vector<FeatureStructure> DataflowAnalyzer::instantiations(const FeatureStructure& category,
                                                               const std::vector<DefiningMember>& members) const {
  std::vector<FeatureStructure> out;
  for (const auto& m : members)
    if (auto u = unify(category, member_structure(m))) out.push_back(mark_type_implied(*u));
  return out;
}

std::size_t DataflowAnalyzer::nondeterminacy(const FeatureStructure& category) const {
  const std::string key = canonical(category, true);
  if (auto it = nondet_cache_.find(key); it != nondet_cache_.end()) return it->second;

  auto members = defining(category);
  std::vector<Path> paths = bound_frontier(category);
  if (mode_ == Mode::Parsing)
    if (auto phon = g_->sig->find_feature(kPhonFeature)) paths.push_back({*phon});

  std::size_t result = members.size();
  if (!members.empty() && !paths.empty()) {
    std::vector<FeatureStructure> projections;
    for (const auto& u : instantiations(category, members)) projections.push_back(project(u, paths));
    const std::size_t n = projections.size();
    std::vector<std::vector<char>> compatible(n, std::vector<char>(n, 1));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        compatible[a][b] = compatible[b][a] = unify(projections[a], projections[b]).value.has_value();
    result = max_clique(compatible);
  }
  nondet_cache_.emplace(key, result);
  return result;
}

std::optional<FeatureStructure> DataflowAnalyzer::mimic(const FeatureStructure& body, std::size_t position) const {
  FeatureStructure cat = body.extract(position + 1);
  auto common = generalize_all(instantiations(cat, defining(cat)));
  if (!common) return std::nullopt;
  auto next = unify_root(body, position + 1, *common);
  if (!next) return std::nullopt;
  return *next.value;
}

std::optional<OrderingResult> DataflowAnalyzer::find_order(const FeatureStructure& body,
                                                           std::optional<std::size_t> head,
                                                           std::size_t budget) const {
  const std::size_t arity = body.root_count() - 1;
  OrderingResult result;
  result.budget = budget;
  std::vector<char> used(arity, 0);

  std::function<bool(const FeatureStructure&)> search = [&](const FeatureStructure& current) {
    if (result.order.size() == arity) return true;
    struct Candidate {
      std::size_t nondet;
      bool not_head;
      std::size_t position;
      auto operator<=>(const Candidate&) const = default;
    };
    std::vector<Candidate> candidates;
    for (std::size_t p = 0; p < arity; ++p) {
      if (used[p]) continue;
      std::size_t nd = nondeterminacy(current.extract(p + 1));
      if (nd >= 1 && nd <= budget) candidates.push_back({nd, head != p, p});
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& c : candidates) {
      auto next = mimic(current, c.position);
      if (!next) continue;
      used[c.position] = 1;
      result.order.push_back(c.position);
      result.steps.push_back(c.nondet);
      if (search(*next)) return true;
      used[c.position] = 0;
      result.order.pop_back();
      result.steps.pop_back();
    }
    return false;
  };

  if (!search(body)) return std::nullopt;
  return result;
}

std::vector<FeatureStructure> DataflowAnalyzer::replay(const FeatureStructure& body,
                                                       const std::vector<std::size_t>& order) const {
  std::vector<FeatureStructure> states{body};
  for (std::size_t p : order) {
    auto next = mimic(states.back(), p);
    states.push_back(next ? *next : states.back());
  }
  return states;
}

std::optional<FeatureStructure> seed_bindings(const Rule& rule, const FeatureStructure& start,
                                              const std::vector<Path>& bound_paths) {
  std::vector<Path> present;
  for (const auto& p : bound_paths)
    if (start.resolve(p)) present.push_back(p);
  auto seeded = unify_root(rule.body, 0, mark_bound(start, present));
  if (!seeded) return std::nullopt;
  return *seeded.value;
}

std::size_t nondeterminacy(const FeatureStructure& category, const Grammar& g, Mode mode) {
  return DataflowAnalyzer(g, mode).nondeterminacy(category);
}

std::optional<FeatureStructure> mimic_evaluation(const FeatureStructure& body, std::size_t position,
                                                 const DataflowAnalyzer& analyzer) {
  return analyzer.mimic(body, position);
}

std::optional<OrderingResult> find_order(const Rule& rule, const FeatureStructure& body, std::size_t budget,
                                         const DataflowAnalyzer& analyzer) {
  return analyzer.find_order(body, rule.head, budget);
}

}  // namespace tfsprime
