#include "tfsprime/earley.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <numeric>
#include <ostream>
#include <set>

namespace tfsprime {

std::vector<std::string> Edge::words() const {
  std::vector<std::string> out;
  for (const auto& d : phon) out.insert(out.end(), d.begin(), d.end());
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> Edge::span() const {
  std::optional<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : spans) {
    if (!s) continue;
    if (!out) out = s;
    else out = std::pair{std::min(out->first, s->first), std::max(out->second, s->second)};
  }
  return out;
}

namespace {

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

const char* origin_name(Edge::Origin o) {
  switch (o) {
    case Edge::Origin::Predict: return "predict";
    case Edge::Origin::Scan: return "scan";
    case Edge::Origin::Complete: return "complete";
  }
  return "?";
}

}  // namespace

Chart::Chart(const PrimedGrammar& primed, EngineOptions options)
    : primed_(&primed),
      opts_(options),
      index_(primed.grammar, primed.grammar.index_paths),
      restrictor_(primed.restrictor()) {
  const auto& rules = primed.grammar.rules;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    std::vector<std::size_t> order(rules[r].arity());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!opts_.declared_order && r < primed.orderings.size() && primed.orderings[r]) order = primed.orderings[r]->order;
    orders_.push_back(std::move(order));
    bodies_.push_back(strip_bindings(rules[r].body));
  }
}

std::vector<Result> Chart::generate(const FeatureStructure& goal) {
  if (done_) throw std::logic_error("a chart runs only once");
  parsing_ = false;
  auto full = unify(primed_->grammar.start, goal);
  if (!full) {
    done_ = true;
    return {};
  }
  return run(strip_bindings(*full.value));
}

std::vector<Result> Chart::parse(const std::vector<std::string>& tokens) {
  if (done_) throw std::logic_error("a chart runs only once");
  for (const auto& w : tokens)
    if (index_.by_word(w).empty()) throw GrammarError("word not in lexicon: " + w);
  parsing_ = true;
  tokens_ = tokens;
  if (tokens.empty()) {
    done_ = true;
    return {};
  }
  return run(strip_bindings(primed_->grammar.start));
}

std::vector<Result> Chart::run(const FeatureStructure& goal) {
  auto started = std::chrono::steady_clock::now();
  goal_ = goal;
  if (opts_.trace) *opts_.trace << "EVENT seed - goal - 0 0\n";
  predict(goal_);
  while (!agenda_.empty() && !done_) {
    std::size_t id = agenda_.back();
    agenda_.pop_back();
    process(id);
  }
  done_ = true;
  if (opts_.verify_index) verify();
  stats_.index_pairs = combined_.size();
  stats_.results = results_.size();
  stats_.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return results_;
}

std::size_t Chart::predict(const FeatureStructure& category) {
  FeatureStructure restricted = strip_bindings(restrict(category, restrictor_));
  std::string key = canonical(restricted, false);
  if (auto it = table_.find(key); it != table_.end()) {
    ++stats_.prediction_hits;
    return it->second;
  }
  if (opts_.subsumption_tabling) {
    for (std::size_t t = 0; t < table_entries_.size(); ++t)
      if (subsumes(table_entries_[t], restricted)) {
        ++stats_.prediction_hits;
        table_.emplace(key, t);
        return t;
      }
  }
  const std::size_t id = table_entries_.size();
  table_.emplace(key, id);
  table_entries_.push_back(restricted);
  ++stats_.predictions;
  for (std::size_t r = 0; r < bodies_.size(); ++r) {
    auto u = unify_root(bodies_[r], 0, restricted);
    if (!u) continue;
    Edge e;
    e.rule = r;
    e.inst = *u.value;
    e.backward = id;
    e.origin = Edge::Origin::Predict;
    e.phon.assign(orders_[r].size(), {});
    e.spans.assign(orders_[r].size(), std::nullopt);
    e.passive = orders_[r].empty();
    add_edge(std::move(e));
  }
  return id;
}

void Chart::process(std::size_t id) {
  if (!edges_[id].passive) {
    const std::size_t pos = orders_[edges_[id].rule][edges_[id].dot];
    std::size_t fwd = predict(edges_[id].inst.extract(pos + 1));
    edges_[id].forward = fwd;
    by_forward_[fwd].push_back(id);
    trace(origin_name(edges_[id].origin), edges_[id]);
    scan(id);
    auto passives = by_backward_[fwd];
    for (std::size_t p : passives) {
      if (done_) return;
      complete(id, p);
    }
    return;
  }
  const std::size_t bwd = edges_[id].backward;
  by_backward_[bwd].push_back(id);
  trace(origin_name(edges_[id].origin), edges_[id]);
  auto actives = by_forward_[bwd];
  for (std::size_t a : actives) complete(a, id);
  if (bwd != 0) return;

  const Edge& e = edges_[id];
  if (parsing_) {
    auto s = e.span();
    if (!s || s->first != 0 || s->second != tokens_.size()) return;
  }
  auto u = unify(e.inst.extract(0), goal_);
  if (!u) return;
  ++stats_.derivations;
  Result r;
  r.words = e.words();
  r.text = join_words(r.words);
  r.fs = *u.value;
  auto cont = r.fs.sig().find_feature("cont");
  auto node = cont ? r.fs.resolve(Path{*cont}) : std::nullopt;
  r.cont = node ? r.fs.extract_node(*node) : r.fs;
  std::string key = r.text + "\t" + canonical(r.cont, false);
  if (!result_keys_.emplace(key, results_.size()).second) return;
  trace("result", e);
  results_.push_back(std::move(r));
  if (opts_.first_only) done_ = true;
}

bool Chart::adjacent(const Edge& active, std::size_t position, std::pair<std::size_t, std::size_t> span) const {
  for (std::size_t d = 0; d < active.spans.size(); ++d) {
    const auto& s = active.spans[d];
    if (!s || d == position) continue;
    if (d < position && (s->second > span.first || (d + 1 == position && s->second != span.first))) return false;
    if (d > position && (s->first < span.second || (d == position + 1 && s->first != span.second))) return false;
  }
  return true;
}

void Chart::scan(std::size_t active) {
  const std::size_t rule = edges_[active].rule;
  const std::size_t pos = orders_[rule][edges_[active].dot];
  const auto& lexicon = primed_->grammar.lexicon;

  auto try_entry = [&](std::size_t entry, std::optional<std::pair<std::size_t, std::size_t>> span) {
    const Edge& a = edges_[active];
    auto u = unify_root(a.inst, pos + 1, lexicon[entry].fs);
    if (!u) return;
    ++stats_.scans;
    Edge e;
    e.rule = rule;
    e.dot = a.dot + 1;
    e.inst = *u.value;
    e.backward = a.backward;
    e.origin = Edge::Origin::Scan;
    e.parent = active;
    e.phon = a.phon;
    e.phon[pos] = {lexicon[entry].word};
    e.spans = a.spans;
    e.spans[pos] = span;
    e.passive = e.dot == orders_[rule].size();
    add_edge(std::move(e));
  };

  if (!parsing_) {
    for (std::size_t entry : index_.lookup(edges_[active].inst.extract(pos + 1))) try_entry(entry, std::nullopt);
    return;
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    std::pair<std::size_t, std::size_t> span{i, i + 1};
    if (!adjacent(edges_[active], pos, span)) continue;
    for (std::size_t entry : index_.by_word(tokens_[i])) try_entry(entry, span);
  }
}

void Chart::complete(std::size_t active, std::size_t passive) {
  ++stats_.completions_attempted;
  const Edge& a = edges_[active];
  const Edge& p = edges_[passive];
  const std::size_t pos = orders_[a.rule][a.dot];
  auto span = p.span();
  if (parsing_ && (!span || !adjacent(a, pos, *span))) return;
  auto u = unify_root(a.inst, pos + 1, p.inst.extract(0));
  if (!u) return;
  ++stats_.completions_succeeded;
  combined_.emplace_back(active, passive);
  Edge e;
  e.rule = a.rule;
  e.dot = a.dot + 1;
  e.inst = *u.value;
  e.backward = a.backward;
  e.origin = Edge::Origin::Complete;
  e.parent = active;
  e.phon = a.phon;
  e.phon[pos] = p.words();
  e.spans = a.spans;
  if (parsing_) e.spans[pos] = span;
  e.passive = e.dot == orders_[a.rule].size();
  add_edge(std::move(e));
}

void Chart::add_edge(Edge e) {
  std::string key = std::to_string(e.rule) + "/" + std::to_string(e.dot) + "/" + std::to_string(e.backward) + "/";
  for (const auto& d : e.phon) key += join_words(d) + ";";
  for (const auto& s : e.spans) key += s ? std::to_string(s->first) + "-" + std::to_string(s->second) + ";" : "_;";
  key += canonical(e.inst, false);
  if (edge_keys_.contains(key)) {
    ++stats_.duplicates;
    return;
  }
  if (edges_.size() >= opts_.edge_cap) throw ResourceError(edges_.size());
  nodes_ += e.inst.node_count();
  if (nodes_ > opts_.node_cap) throw ResourceError(edges_.size(), "node cap");
  e.id = edges_.size();
  edge_keys_.emplace(std::move(key), e.id);
  ++stats_.edges;
  ++(e.passive ? stats_.passive_edges : stats_.active_edges);
  agenda_.push_back(e.id);
  edges_.push_back(std::move(e));
}

void Chart::trace(const char* kind, const Edge& e) const {
  if (!opts_.trace) return;
  *opts_.trace << "EVENT " << kind << " " << e.id << " " << primed_->grammar.rules[e.rule].name << " " << e.dot << " "
               << e.backward << " " << (e.forward ? std::to_string(*e.forward) : std::string("-")) << "\n";
}

void Chart::verify() {
  stats_.index_verified = true;
  bool ok = true;
  std::vector<std::size_t> actives, passives;
  for (const auto& e : edges_) {
    if (e.passive && e.forward) ok = false;
    if (e.origin != Edge::Origin::Predict && e.parent && edges_[*e.parent].backward != e.backward) ok = false;
    if (e.passive) {
      auto it = by_backward_.find(e.backward);
      if (it != by_backward_.end() && std::count(it->second.begin(), it->second.end(), e.id)) passives.push_back(e.id);
    } else if (e.forward) {
      actives.push_back(e.id);
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> via_index(combined_.begin(), combined_.end());
  std::set<std::pair<std::size_t, std::size_t>> exhaustive;
  for (std::size_t a : actives) {
    const Edge& ea = edges_[a];
    const std::size_t pos = orders_[ea.rule][ea.dot];
    for (std::size_t p : passives) {
      const Edge& ep = edges_[p];
      if (*ea.forward != ep.backward) continue;
      auto span = ep.span();
      if (parsing_ && (!span || !adjacent(ea, pos, *span))) continue;
      if (unify_root(ea.inst, pos + 1, ep.inst.extract(0))) exhaustive.emplace(a, p);
    }
  }
  stats_.index_complete = ok && via_index == exhaustive;
}

std::vector<Result> generate(const PrimedGrammar& primed, const FeatureStructure& goal, const EngineOptions& options,
                             EngineStats* stats) {
  if (primed.mode != Mode::Generation) throw GrammarError("grammar is primed for parsing, not generation");
  Chart chart(primed, options);
  auto out = chart.generate(goal);
  if (stats) *stats = chart.stats();
  return out;
}

std::vector<Result> parse(const PrimedGrammar& primed, const std::vector<std::string>& tokens,
                          const EngineOptions& options, EngineStats* stats) {
  if (primed.mode != Mode::Parsing) throw GrammarError("grammar is primed for generation, not parsing");
  Chart chart(primed, options);
  auto out = chart.parse(tokens);
  if (stats) *stats = chart.stats();
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) || c == '?' || c == '.' || c == ',' || c == '!') {
      flush();
      continue;
    }
    cur += u < 128 ? static_cast<char>(std::tolower(u)) : c;
  }
  flush();
  return out;
}

}  // namespace tfsprime
