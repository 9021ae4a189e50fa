#include "tfsprime/type_hierarchy.hpp"

#include <algorithm>
#include <deque>

namespace tfsprime {

namespace {

constexpr const char* kTop = "top";

// ancestors[t][u] != 0 iff u is t or an ancestor of t.  Throws on cycles.
std::vector<std::vector<char>> closure(const std::vector<std::string>& names,
                                       const std::vector<std::vector<TypeId>>& parents) {
  const std::size_t n = names.size();
  std::vector<std::vector<TypeId>> children(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    for (TypeId p : parents[t]) {
      children[static_cast<std::size_t>(p)].push_back(static_cast<TypeId>(t));
      ++indegree[t];
    }
  }
  std::deque<std::size_t> ready;
  for (std::size_t t = 0; t < n; ++t)
    if (indegree[t] == 0) ready.push_back(t);
  std::vector<std::vector<char>> anc(n, std::vector<char>(n, 0));
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t t = ready.front();
    ready.pop_front();
    ++seen;
    anc[t][t] = 1;
    for (TypeId p : parents[t]) {
      const auto& pa = anc[static_cast<std::size_t>(p)];
      for (std::size_t u = 0; u < n; ++u)
        if (pa[u]) anc[t][u] = 1;
    }
    for (TypeId c : children[t])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push_back(static_cast<std::size_t>(c));
  }
  if (seen != n) {
    for (std::size_t t = 0; t < n; ++t)
      if (indegree[t] != 0) throw GrammarError("type hierarchy has a cycle through type " + names[t]);
  }
  return anc;
}

// Maximal elements of `set` (no other member lies strictly above).
std::vector<TypeId> maximal(const std::vector<TypeId>& set, const std::vector<std::vector<char>>& anc) {
  std::vector<TypeId> out;
  for (TypeId x : set) {
    bool dominated = false;
    for (TypeId y : set)
      if (y != x && anc[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(x);
  }
  return out;
}

std::vector<TypeId> minimal(const std::vector<TypeId>& set, const std::vector<std::vector<char>>& anc) {
  std::vector<TypeId> out;
  for (TypeId x : set) {
    bool dominated = false;
    for (TypeId y : set)
      if (y != x && anc[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(x);
  }
  return out;
}

}  // namespace

TypeHierarchy::Builder::Builder() {
  ensure_type(kTop);
  add_subtypes(kTop, {"string", "list"});
  add_subtypes("list", {"e-list", "ne-list"});
  add_appropriateness("ne-list", "first", kTop);
  add_appropriateness("ne-list", "rest", "list");
  // Built-ins are not echoed when a grammar is printed.
  declared_subs_.clear();
  declared_approps_.clear();
}

TypeId TypeHierarchy::Builder::ensure_type(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<TypeId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(std::string(name), id);
  parents_.emplace_back();
  if (id != 0 && name.front() == '"') parents_.back().push_back(ids_.at("string"));
  return id;
}

void TypeHierarchy::Builder::add_subtypes(std::string_view parent, const std::vector<std::string>& children) {
  TypeId p = ensure_type(parent);
  for (const auto& c : children) {
    if (c == kTop) throw GrammarError("type top cannot be declared as a subtype of " + std::string(parent));
    TypeId ci = ensure_type(c);
    auto& ps = parents_[static_cast<std::size_t>(ci)];
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  }
  declared_subs_.emplace_back(std::string(parent), children);
}

void TypeHierarchy::Builder::add_appropriateness(std::string_view type, std::string_view feature,
                                                 std::string_view value) {
  declared_approps_.push_back({std::string(type), std::string(feature), std::string(value)});
}

TypeId TypeHierarchy::Builder::intern_string(std::string_view word) {
  std::string quoted = "\"" + std::string(word) + "\"";
  bool fresh = !ids_.contains(quoted);
  TypeId id = ensure_type(quoted);
  if (fresh) strings_.push_back(quoted);
  return id;
}

std::shared_ptr<const TypeHierarchy> TypeHierarchy::Builder::finish() {
  // Every type other than top hangs below top.
  for (std::size_t t = 1; t < names_.size(); ++t)
    if (parents_[t].empty()) parents_[t].push_back(0);

  std::vector<std::string> names = names_;
  std::vector<std::vector<TypeId>> parents = parents_;
  std::vector<char> synthetic(names.size(), 0);
  auto anc = closure(names, parents);

  auto check_meets = [&](const std::vector<std::vector<char>>& a) {
    const std::size_t n = names.size();
    std::vector<TypeId> lower;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y) {
        lower.clear();
        for (std::size_t z = 0; z < n; ++z)
          if (a[z][x] && a[z][y]) lower.push_back(static_cast<TypeId>(z));
        if (lower.size() > 1 && maximal(lower, a).size() > 1)
          throw GrammarError("type hierarchy is not bounded complete: " + names[x] + " and " + names[y] +
                             " have no unique greatest common subtype");
      }
  };
  check_meets(anc);

  // Complete joins with synthetic types until every pair has a unique least
  // common supertype.
  for (bool changed = true; changed;) {
    changed = false;
    const std::size_t n = names.size();
    std::vector<TypeId> upper;
    for (std::size_t x = 0; x < n && !changed; ++x)
      for (std::size_t y = x + 1; y < n && !changed; ++y) {
        upper.clear();
        for (std::size_t z = 0; z < n; ++z)
          if (anc[x][z] && anc[y][z]) upper.push_back(static_cast<TypeId>(z));
        auto mins = minimal(upper, anc);
        if (mins.size() <= 1) continue;
        std::sort(mins.begin(), mins.end());
        std::string name = "*";
        for (std::size_t i = 0; i < mins.size(); ++i) name += (i ? "+" : "") + names[static_cast<std::size_t>(mins[i])];
        name += "*";
        auto s = static_cast<TypeId>(names.size());
        std::vector<TypeId> below;
        for (std::size_t z = 0; z < n; ++z) {
          bool under_all = std::all_of(mins.begin(), mins.end(),
                                       [&](TypeId m) { return anc[z][static_cast<std::size_t>(m)] != 0; });
          if (under_all) below.push_back(static_cast<TypeId>(z));
        }
        names.push_back(name);
        parents.push_back(mins);
        synthetic.push_back(1);
        for (TypeId c : maximal(below, anc)) parents[static_cast<std::size_t>(c)].push_back(s);
        anc = closure(names, parents);
        changed = true;
      }
  }
  check_meets(anc);

  auto h = std::shared_ptr<TypeHierarchy>(new TypeHierarchy());
  const std::size_t n = names.size();
  h->names_ = names;
  for (std::size_t t = 0; t < n; ++t) h->ids_.emplace(names[t], static_cast<TypeId>(t));
  h->parents_ = parents;
  h->children_.assign(n, {});
  for (std::size_t t = 0; t < n; ++t)
    for (TypeId p : parents[t]) h->children_[static_cast<std::size_t>(p)].push_back(static_cast<TypeId>(t));
  h->ancestors_ = anc;
  h->synthetic_ = synthetic;
  h->meet_.assign(n * n, -1);
  h->join_.assign(n * n, 0);
  std::vector<TypeId> set;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) {
      set.clear();
      for (std::size_t z = 0; z < n; ++z)
        if (anc[z][x] && anc[z][y]) set.push_back(static_cast<TypeId>(z));
      if (!set.empty()) {
        auto m = maximal(set, anc);
        h->meet_[x * n + y] = h->meet_[y * n + x] = m.front();
      }
      set.clear();
      for (std::size_t z = 0; z < n; ++z)
        if (anc[x][z] && anc[y][z]) set.push_back(static_cast<TypeId>(z));
      auto j = minimal(set, anc);
      h->join_[x * n + y] = h->join_[y * n + x] = j.front();
    }
  h->string_ = h->ids_.at("string");
  h->list_ = h->ids_.at("list");
  h->elist_ = h->ids_.at("e-list");
  h->nelist_ = h->ids_.at("ne-list");

  // Features and appropriateness (built-ins first so first/rest get stable ids).
  std::vector<Approp> approps = {{"ne-list", "first", kTop}, {"ne-list", "rest", "list"}};
  approps.insert(approps.end(), declared_approps_.begin(), declared_approps_.end());
  for (const auto& a : approps) {
    if (!h->feature_ids_.contains(a.feature)) {
      h->feature_ids_.emplace(a.feature, static_cast<FeatureId>(h->feature_names_.size()));
      h->feature_names_.push_back(a.feature);
    }
    if (!h->ids_.contains(a.type)) throw GrammarError("appropriateness declared for unknown type " + a.type);
    if (!h->ids_.contains(a.value))
      throw GrammarError("appropriateness value type " + a.value + " for feature " + a.feature + " is unknown");
  }
  h->first_ = h->feature_ids_.at("first");
  h->rest_ = h->feature_ids_.at("rest");
  h->approp_.assign(n, {});
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::pair<FeatureId, TypeId>> row;
    for (const auto& a : approps) {
      auto at = static_cast<std::size_t>(h->ids_.at(a.type));
      if (!anc[t][at]) continue;
      FeatureId f = h->feature_ids_.at(a.feature);
      TypeId v = h->ids_.at(a.value);
      auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == f; });
      if (it == row.end()) {
        row.emplace_back(f, v);
      } else {
        TypeId m = h->meet_[static_cast<std::size_t>(it->second) * n + static_cast<std::size_t>(v)];
        if (m < 0)
          throw GrammarError("inconsistent appropriateness for feature " + a.feature + " on type " + names[t]);
        it->second = m;
      }
    }
    std::sort(row.begin(), row.end());
    h->approp_[t] = std::move(row);
  }
  h->introducer_.assign(h->feature_names_.size(), 0);
  for (std::size_t f = 0; f < h->feature_names_.size(); ++f) {
    std::vector<TypeId> carriers;
    for (std::size_t t = 0; t < n; ++t)
      if (h->appropriate(static_cast<TypeId>(t), static_cast<FeatureId>(f))) carriers.push_back(static_cast<TypeId>(t));
    auto roots = maximal(carriers, anc);
    if (roots.size() != 1)
      throw GrammarError("feature " + h->feature_names_[f] + " is introduced by more than one unrelated type");
    h->introducer_[f] = roots.front();
  }
  h->declared_subs_ = declared_subs_;
  h->declared_approps_ = declared_approps_;
  return h;
}

std::optional<TypeId> TypeHierarchy::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TypeId TypeHierarchy::id(std::string_view name) const {
  if (auto t = find(name)) return *t;
  throw GrammarError("unknown type " + std::string(name));
}

std::optional<FeatureId> TypeHierarchy::find_feature(std::string_view name) const {
  auto it = feature_ids_.find(std::string(name));
  if (it == feature_ids_.end()) return std::nullopt;
  return it->second;
}

FeatureId TypeHierarchy::feature(std::string_view name) const {
  if (auto f = find_feature(name)) return *f;
  throw GrammarError("unknown feature " + std::string(name));
}

std::optional<TypeId> TypeHierarchy::appropriate(TypeId t, FeatureId f) const {
  for (const auto& [feat, value] : approp_[static_cast<std::size_t>(t)])
    if (feat == f) return value;
  return std::nullopt;
}

}  // namespace tfsprime
