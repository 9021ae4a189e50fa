#include <algorithm>
#include <set>

#include "tfsprime/priming.hpp"
#include "unify_engine.hpp"

namespace tfsprime {

std::string kind_name(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::AllOrdersRejected: return "all-orders-rejected";
    case Diagnostic::Kind::DisplacementSuspected: return "displacement-suspected";
    case Diagnostic::Kind::BudgetCapReached: return "budget-cap-reached";
  }
  return "?";
}

Diagnostic::Kind parse_kind(std::string_view text) {
  for (auto k : {Diagnostic::Kind::AllOrdersRejected, Diagnostic::Kind::DisplacementSuspected,
                 Diagnostic::Kind::BudgetCapReached})
    if (kind_name(k) == text) return k;
  throw GrammarError("unknown diagnostic kind '" + std::string(text) + "'");
}

std::vector<Path> PrimedGrammar::restrictor() const {
  std::set<Path> all;
  for (const auto& r : restrictors) all.insert(r.begin(), r.end());
  return {all.begin(), all.end()};
}

Rule partial_execute(const Rule& outer, std::size_t position, const Rule& inner) {
  if (position >= outer.arity())
    throw GrammarError("partial execution position " + std::to_string(position + 1) + " out of range for rule " +
                       outer.name);
  detail::GraphUnifier u(outer.body.sig_ptr());
  NodeId o = u.append(outer.body);
  NodeId i = u.append(inner.body);
  u.merge(o + outer.body.root(position + 1), i + inner.body.root(0));
  u.infer_types();
  std::vector<NodeId> roots{o + outer.body.root(0)};
  for (std::size_t d = 0; d < outer.arity(); ++d) {
    if (d != position) {
      roots.push_back(o + outer.body.root(d + 1));
      continue;
    }
    for (std::size_t e = 0; e < inner.arity(); ++e) roots.push_back(i + inner.body.root(e + 1));
  }
  auto result = u.finish(roots);
  if (!result) {
    throw GrammarError("cannot splice rule " + inner.name + " into rule " + outer.name + " at daughter " +
                       std::to_string(position + 1) + ": clash at path '" +
                       format_path(outer.body.sig(), result.clash_path) + "' (" + result.reason + ")");
  }
  Rule out;
  out.name = outer.name + "+" + inner.name;
  out.body = *result.value;
  if (outer.head) {
    if (*outer.head < position) out.head = outer.head;
    else if (*outer.head > position) out.head = *outer.head + inner.arity() - 1;
    else if (inner.head) out.head = position + *inner.head;
  }
  return out;
}

Grammar apply_partial_execution(const Grammar& g) {
  Grammar out = g;
  out.directives.clear();
  for (const auto& d : g.directives) {
    auto idx = out.rule_index(d.rule);
    if (!idx) throw GrammarError("partial execution names unknown rule " + d.rule);
    const Rule outer = out.rules[*idx];
    const FeatureStructure slot = outer.daughter(d.position);
    std::vector<Rule> spliced;
    for (const auto& inner : out.rules)
      if (unify(slot, inner.mother())) spliced.push_back(partial_execute(outer, d.position, inner));
    if (spliced.empty())
      throw GrammarError("partial execution of rule " + d.rule + ": no rule defines daughter " +
                         std::to_string(d.position + 1));
    bool lexical = std::any_of(out.lexicon.begin(), out.lexicon.end(),
                               [&](const LexicalEntry& e) { return unify(slot, e.fs).value.has_value(); });
    auto at = out.rules.begin() + static_cast<std::ptrdiff_t>(*idx);
    if (!lexical) at = out.rules.erase(at);
    else ++at;
    out.rules.insert(at, spliced.begin(), spliced.end());
  }
  return out;
}

namespace {

bool reachable_from_mother(const FeatureStructure& body, NodeId target) {
  std::vector<char> seen(body.node_count(), 0);
  std::vector<NodeId> stack{body.root(0)};
  seen[body.root(0)] = 1;
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    if (x == target) return true;
    for (const auto& [f, y] : body.node(x).arcs)
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
  }
  return false;
}

std::vector<Path> normalize_paths(std::set<Path> paths, std::size_t depth) {
  std::set<Path> cut;
  for (auto p : paths) {
    if (p.size() > depth) p.resize(depth);
    cut.insert(std::move(p));
  }
  std::vector<Path> out;
  for (const auto& p : cut) {
    bool covered = std::any_of(cut.begin(), cut.end(), [&](const Path& q) {
      return q.size() < p.size() && std::equal(q.begin(), q.end(), p.begin());
    });
    if (!covered) out.push_back(p);
  }
  return out;
}

class Primer {
 public:
  Primer(const Grammar& g, Mode mode, const PrimingOptions& opts)
      : g_(g), analyzer_(g_, mode, opts.summary_depth), opts_(opts) {
    cap_ = opts.budget_cap.value_or(std::max<std::size_t>(1, g_.lexicon.size()));
  }

  PrimedGrammar run(Mode mode) {
    const auto& bound = mode == Mode::Generation ? g_.generation_bound : g_.parsing_bound;
    const std::size_t n = g_.rules.size();
    seeds_.assign(n, std::nullopt);
    orders_.assign(n, std::nullopt);
    for (std::size_t r = 0; r < n; ++r) seeds_[r] = seed_bindings(g_.rules[r], g_.start, bound);

    for (int round = 0; round < 64; ++round) {
      bool changed = false;
      for (std::size_t r = 0; r < n; ++r) {
        if (!seeds_[r]) continue;
        orders_[r] = order_rule(r);
        for (const auto& cat : evaluated_categories(r)) changed = propagate(cat) || changed;
      }
      if (!changed) break;
    }

    PrimedGrammar out;
    out.mode = mode;
    out.budget_cap = cap_;
    out.restrictor_depth = opts_.restrictor_depth;
    out.grammar = g_;
    out.grammar.rules.clear();
    for (std::size_t r = 0; r < n; ++r) {
      if (!seeds_[r]) {
        out.unreachable.push_back(g_.rules[r].name);
        continue;
      }
      out.grammar.rules.push_back(g_.rules[r]);
      out.orderings.push_back(orders_[r]);
      out.restrictors.push_back(restrictor_for(r));
      if (!orders_[r]) out.diagnostics.push_back(diagnose(r));
    }
    return out;
  }

 private:
  std::optional<OrderingResult> order_rule(std::size_t r) const {
    for (std::size_t b = 1; b <= cap_; ++b)
      if (auto o = analyzer_.find_order(*seeds_[r], g_.rules[r].head, b)) return o;
    return std::nullopt;
  }

  // Each daughter category as it stands when it is evaluated.
  std::vector<FeatureStructure> evaluated_categories(std::size_t r) const {
    std::vector<FeatureStructure> cats;
    const auto& seed = *seeds_[r];
    if (!orders_[r]) {
      for (std::size_t d = 0; d + 1 < seed.root_count(); ++d) cats.push_back(seed.extract(d + 1));
      return cats;
    }
    auto states = analyzer_.replay(seed, orders_[r]->order);
    for (std::size_t i = 0; i < orders_[r]->order.size(); ++i) cats.push_back(states[i].extract(orders_[r]->order[i] + 1));
    return cats;
  }

  bool propagate(const FeatureStructure& cat) {
    bool changed = false;
    for (std::size_t r = 0; r < g_.rules.size(); ++r) {
      auto candidate = unify_root(g_.rules[r].body, 0, cat);
      if (!candidate) continue;
      if (!seeds_[r]) {
        seeds_[r] = *candidate.value;
        changed = true;
        continue;
      }
      FeatureStructure merged = generalize(*seeds_[r], *candidate.value);
      if (canonical(merged) != canonical(*seeds_[r])) {
        seeds_[r] = std::move(merged);
        changed = true;
      }
    }
    return changed;
  }

  std::vector<Path> restrictor_for(std::size_t r) const {
    std::set<Path> paths;
    for (auto& p : bound_frontier(seeds_[r]->extract(0))) paths.insert(std::move(p));
    FeatureStructure bare = g_.rules[r].mother();
    for (auto& p : all_paths(bare, opts_.restrictor_depth)) {
      auto node = bare.resolve(p);
      if (!p.empty() && node && bare.node(*node).arcs.empty()) paths.insert(std::move(p));
    }
    return normalize_paths(std::move(paths), opts_.restrictor_depth);
  }

  Diagnostic diagnose(std::size_t r) const {
    const Rule& rule = g_.rules[r];
    FeatureStructure body = *seeds_[r];
    std::vector<char> done(rule.arity(), 0);
    std::vector<std::size_t> blocking;
    for (std::size_t step = 0; step < rule.arity(); ++step) {
      std::optional<std::tuple<std::size_t, bool, std::size_t>> best;
      std::vector<std::size_t> over;
      for (std::size_t p = 0; p < rule.arity(); ++p) {
        if (done[p]) continue;
        std::size_t nd = analyzer_.nondeterminacy(body.extract(p + 1));
        if (nd == 0 || nd > cap_) {
          over.push_back(p);
          continue;
        }
        std::tuple<std::size_t, bool, std::size_t> key{nd, rule.head != p, p};
        if (!best || key < *best) best = key;
      }
      auto next = best ? analyzer_.mimic(body, std::get<2>(*best)) : std::nullopt;
      if (!next) {
        blocking = over;
        if (best) blocking.insert(blocking.begin(), std::get<2>(*best));
        break;
      }
      done[std::get<2>(*best)] = 1;
      body = *next;
    }

    Diagnostic d;
    d.rule = rule.name;
    if (blocking.empty()) {
      d.kind = Diagnostic::Kind::BudgetCapReached;
      d.explanation = "no evaluation order of " + rule.name + " stays within budget " + std::to_string(cap_);
      d.remedy = "raise the budget cap above " + std::to_string(cap_);
      return d;
    }
    for (std::size_t p : blocking) {
      if (!reachable_from_mother(body, body.root(p + 1))) continue;
      if (auto outer = displacing_rule(r)) {
        d.kind = Diagnostic::Kind::DisplacementSuspected;
        d.rule = g_.rules[outer->first].name;
        d.related = rule.name;
        d.explanation = "daughter " + std::to_string(p + 1) + " of " + rule.name +
                        " is bound only through its mother, which is a daughter of " + d.rule;
        d.remedy = "@partial-execute rule=" + d.rule + " pos=" + std::to_string(outer->second + 1);
        return d;
      }
    }
    const std::size_t p = blocking.front();
    std::string which = "daughter " + std::to_string(p + 1);
    if (bound_frontier(body.extract(p + 1)).empty()) {
      d.kind = Diagnostic::Kind::AllOrdersRejected;
      d.explanation = "all evaluation orders of " + rule.name + " are rejected up to budget " + std::to_string(cap_) +
                      ": " + which + " never becomes bound";
      d.remedy = "split rule " + rule.name + " into more specific rules that constrain " + which;
      return d;
    }
    d.kind = Diagnostic::Kind::BudgetCapReached;
    d.explanation = which + " of " + rule.name + " exceeds budget " + std::to_string(cap_);
    d.remedy = "raise the budget cap above " + std::to_string(cap_);
    return d;
  }

  // A rule with a daughter that r's mother can fill; grammatical heads first.
  std::optional<std::pair<std::size_t, std::size_t>> displacing_rule(std::size_t r) const {
    const FeatureStructure mother = g_.rules[r].mother();
    std::optional<std::pair<std::size_t, std::size_t>> any;
    for (std::size_t o = 0; o < g_.rules.size(); ++o) {
      const Rule& outer = g_.rules[o];
      for (std::size_t k = 0; k < outer.arity(); ++k) {
        if (!unify(outer.daughter(k), mother)) continue;
        if (outer.head == k) return std::pair{o, k};
        if (!any) any = std::pair{o, k};
      }
    }
    return any;
  }

  const Grammar& g_;
  DataflowAnalyzer analyzer_;
  PrimingOptions opts_;
  std::size_t cap_ = 1;
  std::vector<std::optional<FeatureStructure>> seeds_;
  std::vector<std::optional<OrderingResult>> orders_;
};

}  // namespace

PrimedGrammar prime_grammar(const Grammar& g, Mode mode, const PrimingOptions& options) {
  Grammar executed = apply_partial_execution(g);
  Primer primer(executed, mode, options);
  return primer.run(mode);
}

}  // namespace tfsprime
