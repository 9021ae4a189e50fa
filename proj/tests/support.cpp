#include "support.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>

#include "tfsprime/avm_io.hpp"

namespace tfsprime::testing {

std::filesystem::path grammar_path(const std::string& file) {
  return std::filesystem::path(TFSPRIME_GRAMMAR_DIR) / file;
}

Grammar fixture(const std::string& file) { return load_grammar_file(grammar_path(file)); }

const char* const kQuestionGoal =
    "[inv +, cont [nucleus [perf-rel, arg [nucleus [kiss-rel, actor karl, undergoer marie]]]]]";
const char* const kTopicGoal = "[cont [nucleus [fut-rel, arg [nucleus [love-rel, actor karl, undergoer anna]]]]]";

std::vector<Goal> fixture_goals() {
  return {
      {"argcomp.gram", kQuestionGoal, {"hat karl marie geküßt"}},
      {"argcomp.gram", "[cont [nucleus [fut-rel, arg [nucleus [love-rel, actor anna, undergoer peter]]]]]", {}},
      {"argcomp_variant.gram", "[cont [nucleus [kiss-rel, actor karl, undergoer marie]]]", {}},
      {"topicalization_pe.gram", kTopicGoal, {"anna lieben wird karl"}},
      {"headrec.gram", "[cont [nucleus [often-rel, arg [nucleus [today-rel, arg [nucleus [sleep-rel, actor karl]]]]]]]",
       {"karl schläft heute oft"}},
      {"headrec.gram", "[cont [nucleus [often-rel, arg [nucleus [sleep-rel]]]]]", {}},
  };
}

std::optional<TypeId> brute_meet(const TypeHierarchy& h, TypeId a, TypeId b) {
  std::vector<TypeId> lower;
  for (TypeId t = 0; t < static_cast<TypeId>(h.type_count()); ++t)
    if (h.subsumes(a, t) && h.subsumes(b, t)) lower.push_back(t);
  // Greatest element: subsumes every other lower bound.
  for (TypeId t : lower)
    if (std::all_of(lower.begin(), lower.end(), [&](TypeId u) { return h.subsumes(t, u); })) return t;
  return std::nullopt;
}

TypeId brute_join(const TypeHierarchy& h, TypeId a, TypeId b) {
  std::vector<TypeId> upper;
  for (TypeId t = 0; t < static_cast<TypeId>(h.type_count()); ++t)
    if (h.subsumes(t, a) && h.subsumes(t, b)) upper.push_back(t);
  // Least element: subsumed by every other upper bound.
  for (TypeId t : upper)
    if (std::all_of(upper.begin(), upper.end(), [&](TypeId u) { return h.subsumes(u, t); })) return t;
  return -1;
}

namespace {

struct MemberValues {
  std::vector<std::optional<FeatureStructure>> at;  // per path; empty when the path is absent
};

}  // namespace

std::optional<std::size_t> nondeterminacy_oracle(const FeatureStructure& category, const Grammar& g,
                                                 const std::vector<FeatureStructure>& summaries, Mode mode,
                                                 std::size_t limit) {
  const auto& sig = g.sig;
  std::vector<FeatureStructure> members;
  for (const auto& e : g.lexicon)
    if (auto u = unify(category, e.fs)) members.push_back(*u.value);
  for (const auto& s : summaries)
    if (auto u = unify(category, s)) members.push_back(*u.value);
  if (members.size() > limit) return std::nullopt;
  if (members.empty()) return 0;

  std::vector<Path> paths = bound_frontier(category);
  if (mode == Mode::Parsing) {
    Path phon{sig->feature(kPhonFeature)};
    if (std::find(paths.begin(), paths.end(), phon) == paths.end()) paths.push_back(phon);
  }
  std::vector<MemberValues> values(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t p = 0; p < paths.size(); ++p) {
      auto n = members[m].resolve(paths[p]);
      if (!n) {
        values[m].at.emplace_back();
        continue;
      }
      FeatureStructure v = strip_bindings(members[m].extract_node(*n));
      values[m].at.push_back(std::move(v));
    }
  }

  // A ground assignment leaves exactly those members whose values it extends,
  // so the best assignment realizes the largest jointly unifiable subset.
  std::size_t best = 0;
  const std::size_t n = members.size();
  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    auto size = static_cast<std::size_t>(std::popcount(subset));
    if (size <= best) continue;
    bool joint = true;
    for (std::size_t p = 0; joint && p < paths.size(); ++p) {
      std::optional<FeatureStructure> acc;
      for (std::size_t m = 0; joint && m < n; ++m) {
        if (!(subset >> m & 1u) || !values[m].at[p]) continue;
        if (!acc) {
          acc = values[m].at[p];
          continue;
        }
        auto u = unify(*acc, *values[m].at[p]);
        if (u) acc = *u.value;
        else joint = false;
      }
    }
    if (joint) best = size;
  }
  return best;
}

std::vector<Derived> enumerate_derivations(const Grammar& g, std::size_t depth) {
  std::vector<Derived> items;
  std::vector<std::size_t> level_of;
  std::map<std::string, bool> seen;
  auto key = [](const Derived& d) {
    std::string k;
    for (const auto& w : d.words) k += w + " ";
    return k + "|" + canonical(d.fs, false);
  };
  for (const auto& e : g.lexicon) {
    Derived d{{e.word}, strip_bindings(e.fs), false};
    if (seen.emplace(key(d), true).second) {
      items.push_back(d);
      level_of.push_back(0);
    }
  }
  for (std::size_t level = 1; level <= depth; ++level) {
    const std::size_t known = items.size();
    std::vector<Derived> fresh;
    for (const auto& rule : g.rules) {
      const std::size_t n = rule.arity();
      std::vector<std::size_t> chosen(n);
      std::function<void(std::size_t, const FeatureStructure&, bool)> fill = [&](std::size_t i,
                                                                                 const FeatureStructure& body,
                                                                                 bool newest) {
        if (i == n) {
          if (!newest) return;
          Derived d{{}, body.extract(0), true};
          for (std::size_t k = 0; k < n; ++k)
            d.words.insert(d.words.end(), items[chosen[k]].words.begin(), items[chosen[k]].words.end());
          if (seen.emplace(key(d), true).second) fresh.push_back(std::move(d));
          return;
        }
        for (std::size_t c = 0; c < known; ++c) {
          auto u = unify_root(body, i + 1, items[c].fs);
          if (!u) continue;
          chosen[i] = c;
          fill(i + 1, *u.value, newest || level_of[c] + 1 == level);
        }
      };
      fill(0, strip_bindings(rule.body), false);
    }
    if (fresh.empty()) break;
    for (auto& d : fresh) {
      items.push_back(std::move(d));
      level_of.push_back(level);
    }
  }
  return items;
}

namespace {

FeatureStructure logical_form(const FeatureStructure& fs) {
  auto cont = fs.sig().find_feature("cont");
  if (cont)
    if (auto n = fs.resolve(Path{*cont})) return fs.extract_node(*n);
  return fs;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

}  // namespace

std::set<Reading> enumerated_readings(const Grammar& g, const std::vector<Derived>& items,
                                      const std::optional<FeatureStructure>& goal) {
  FeatureStructure target = strip_bindings(g.start);
  if (goal) target = strip_bindings(*unify(target, *goal).value);
  std::set<Reading> out;
  for (const auto& d : items) {
    if (!d.phrasal) continue;
    auto u = unify(d.fs, target);
    if (u) out.emplace(join_words(d.words), canonical(logical_form(*u.value), false));
  }
  return out;
}

std::set<Reading> readings(const std::vector<Result>& results) {
  std::set<Reading> out;
  for (const auto& r : results) out.emplace(r.text, canonical(r.cont, false));
  return out;
}

FeatureStructure random_structure(const HierarchyPtr& sig, std::mt19937& rng, int max_depth) {
  const auto& h = *sig;
  std::vector<FeatureStructure::Node> nodes;
  std::vector<NodeId> finished;
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  auto subtype_of = [&](TypeId bound) {
    std::vector<TypeId> options;
    for (TypeId t = 0; t < static_cast<TypeId>(h.type_count()); ++t)
      if (h.subsumes(bound, t) && !h.is_string(t)) options.push_back(t);
    if (options.empty()) return bound;
    return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  };
  std::function<NodeId(TypeId, int)> make = [&](TypeId bound, int depth) -> NodeId {
    if (depth > 0 && chance(0.15)) {
      std::vector<NodeId> fits;
      for (NodeId f : finished)
        if (h.subsumes(bound, nodes[f].type)) fits.push_back(f);
      if (!fits.empty()) return fits[std::uniform_int_distribution<std::size_t>(0, fits.size() - 1)(rng)];
    }
    TypeId t = subtype_of(bound);
    NodeId id = static_cast<NodeId>(nodes.size());
    nodes.push_back({t, chance(0.2), {}});
    if (depth < max_depth) {
      for (const auto& [f, v] : h.features_of(t)) {
        if (!chance(0.5)) continue;
        NodeId child = make(v, depth + 1);
        nodes[id].arcs.emplace_back(f, child);
      }
    }
    finished.push_back(id);
    return id;
  };
  NodeId root = make(h.top(), 0);
  return FeatureStructure(sig, std::move(nodes), {root});
}

namespace {

// Every path from the root, with the node it reaches.
void paths_to(const FeatureStructure& fs, NodeId n, Path& prefix, std::vector<std::pair<Path, NodeId>>& out) {
  out.emplace_back(prefix, n);
  for (const auto& [f, c] : fs.node(n).arcs) {
    prefix.push_back(f);
    paths_to(fs, c, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::pair<Path, NodeId>> paths_of(const FeatureStructure& fs) {
  std::vector<std::pair<Path, NodeId>> out;
  Path prefix;
  paths_to(fs, fs.root(), prefix, out);
  return out;
}

bool flagged(const FeatureStructure& fs, const Path& p) {
  auto n = fs.resolve(p);
  return n && fs.node(*n).bound;
}

bool flagged_on_prefix(const FeatureStructure& fs, const Path& p) {
  for (std::size_t len = 0; len <= p.size(); ++len)
    if (flagged(fs, Path(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(len)))) return true;
  return false;
}

}  // namespace

std::vector<std::string> check_laws(const FeatureStructure& a, const FeatureStructure& b, bool* unified) {
  std::vector<std::string> fail;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) fail.push_back(what);
  };
  auto ab = unify(a, b);
  auto ba = unify(b, a);
  if (unified) *unified = ab.value.has_value();
  expect(ab.value.has_value() == ba.value.has_value(), "unify commutes on success");
  if (ab && ba) expect(isomorphic(*ab.value, *ba.value), "unify commutative");

  auto aa = unify(a, a);
  expect(aa && isomorphic(*aa.value, a), "unify idempotent");
  expect(isomorphic(generalize(a, a), a), "generalize idempotent");

  FeatureStructure g1 = generalize(a, b), g2 = generalize(b, a);
  expect(isomorphic(g1, g2), "generalize commutative");
  expect(subsumes(g1, a) && subsumes(g1, b), "generalization subsumes inputs");
  expect(is_well_typed(g1) && bindings_closed(g1), "generalization well formed");
  for (const auto& [p, n] : paths_of(g1))
    expect(g1.node(n).bound == (flagged(a, p) && flagged(b, p)), "binding AND at " + format_path(a.sig(), p));

  if (ab) {
    const FeatureStructure& c = *ab.value;
    expect(subsumes(a, c) && subsumes(b, c), "inputs subsume unifier");
    expect(is_well_typed(c) && bindings_closed(c) && is_acyclic(c), "unifier well formed");
    // A node is bound iff some path to it, or a prefix of one, was flagged in an input.
    std::map<NodeId, bool> expected;
    for (const auto& [p, n] : paths_of(c)) expected[n] = expected[n] || flagged_on_prefix(a, p) || flagged_on_prefix(b, p);
    for (const auto& [n, want] : expected) expect(c.node(n).bound == want, "binding OR");
    expect(subsumes(generalize(a, c), a) && isomorphic(generalize(a, c), a, false), "absorption");
  }
  return fail;
}

}  // namespace tfsprime::testing
