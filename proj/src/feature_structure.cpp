#include "tfsprime/feature_structure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "unify_engine.hpp"

namespace tfsprime {

FeatureStructure::FeatureStructure(HierarchyPtr sig, std::optional<TypeId> type) : sig_(std::move(sig)) {
  Node n;
  n.type = type.value_or(sig_->top());
  nodes_.push_back(std::move(n));
  roots_.push_back(0);
}

FeatureStructure::FeatureStructure(HierarchyPtr sig, std::vector<Node> nodes, std::vector<NodeId> roots)
    : sig_(std::move(sig)) {
  // Breadth-first renumbering from the roots drops unreachable nodes.
  std::vector<std::int64_t> remap(nodes.size(), -1);
  std::vector<NodeId> order;
  std::deque<NodeId> queue;
  for (NodeId r : roots) {
    if (remap[r] < 0) {
      remap[r] = static_cast<std::int64_t>(order.size());
      order.push_back(r);
      queue.push_back(r);
    }
  }
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    for (const auto& arc : nodes[n].arcs) {
      if (remap[arc.second] < 0) {
        remap[arc.second] = static_cast<std::int64_t>(order.size());
        order.push_back(arc.second);
        queue.push_back(arc.second);
      }
    }
  }
  nodes_.reserve(order.size());
  for (NodeId old : order) {
    Node n = std::move(nodes[old]);
    for (auto& arc : n.arcs) arc.second = static_cast<NodeId>(remap[arc.second]);
    std::sort(n.arcs.begin(), n.arcs.end());
    nodes_.push_back(std::move(n));
  }
  for (NodeId r : roots) roots_.push_back(static_cast<NodeId>(remap[r]));
  // Downward closure of binding flags.
  std::vector<NodeId> work;
  for (NodeId i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].bound) work.push_back(i);
  while (!work.empty()) {
    NodeId n = work.back();
    work.pop_back();
    for (const auto& arc : nodes_[n].arcs) {
      if (!nodes_[arc.second].bound) {
        nodes_[arc.second].bound = true;
        work.push_back(arc.second);
      }
    }
  }
}

std::optional<NodeId> FeatureStructure::follow(NodeId from, std::span<const FeatureId> path) const {
  NodeId cur = from;
  for (FeatureId f : path) {
    auto next = nodes_[cur].arc(f);
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

FeatureStructure FeatureStructure::extract(std::size_t root_index) const { return extract_node(root(root_index)); }

FeatureStructure FeatureStructure::extract_node(NodeId node) const {
  return FeatureStructure(sig_, nodes_, {node});
}

bool FeatureStructure::bound_at(NodeId id) const {
  return nodes_[id].bound || sig_->is_atomic(nodes_[id].type);
}

UnifyResult unify(const FeatureStructure& a, const FeatureStructure& b) {
  detail::GraphUnifier u(a.sig_ptr());
  NodeId oa = u.append(a);
  NodeId ob = u.append(b);
  u.merge(oa + a.root(), ob + b.root());
  u.infer_types();
  return u.finish({oa + a.root()});
}

UnifyResult unify_at(const FeatureStructure& target, NodeId at, const FeatureStructure& category) {
  detail::GraphUnifier u(target.sig_ptr());
  NodeId ot = u.append(target);
  NodeId oc = u.append(category);
  std::vector<NodeId> roots;
  for (NodeId r : target.roots()) roots.push_back(ot + r);
  u.merge(ot + at, oc + category.root());
  u.infer_types();
  return u.finish(roots);
}

UnifyResult unify_root(const FeatureStructure& target, std::size_t root_index, const FeatureStructure& category) {
  return unify_at(target, target.root(root_index), category);
}

FeatureStructure generalize(const FeatureStructure& a, const FeatureStructure& b) {
  const auto& sig = a.sig();
  using Node = FeatureStructure::Node;
  std::vector<Node> out;
  std::map<std::pair<NodeId, NodeId>, NodeId> pairs;
  std::vector<std::pair<NodeId, NodeId>> work;
  auto node_for = [&](NodeId x, NodeId y) {
    auto [it, fresh] = pairs.try_emplace({x, y}, static_cast<NodeId>(out.size()));
    if (fresh) {
      Node n;
      n.type = sig.join(a.node(x).type, b.node(y).type);
      n.bound = a.node(x).bound && b.node(y).bound;
      out.push_back(std::move(n));
      work.emplace_back(x, y);
    }
    return it->second;
  };
  std::vector<NodeId> roots;
  const std::size_t shared_roots = std::min(a.root_count(), b.root_count());
  for (std::size_t i = 0; i < shared_roots; ++i) roots.push_back(node_for(a.root(i), b.root(i)));
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    NodeId self = pairs.at({x, y});
    const Node& na = a.node(x);
    const Node& nb = b.node(y);
    std::vector<std::pair<FeatureId, NodeId>> arcs;
    for (const auto& [f, tx] : na.arcs) {
      auto ty = nb.arc(f);
      if (!ty || !sig.appropriate(out[self].type, f)) continue;
      arcs.emplace_back(f, node_for(tx, *ty));
    }
    out[self].arcs = std::move(arcs);
  }
  return FeatureStructure(a.sig_ptr(), std::move(out), std::move(roots));
}

std::optional<FeatureStructure> generalize_all(std::span<const FeatureStructure> items) {
  if (items.empty()) return std::nullopt;
  FeatureStructure acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = generalize(acc, items[i]);
  return acc;
}

bool subsumes(const FeatureStructure& general, const FeatureStructure& specific) {
  const auto& sig = general.sig();
  std::vector<std::int64_t> image(general.node_count(), -1);
  std::vector<std::pair<NodeId, NodeId>> work;
  if (general.root_count() > specific.root_count()) return false;
  for (std::size_t i = 0; i < general.root_count(); ++i) {
    NodeId g = general.root(i), sp = specific.root(i);
    if (image[g] >= 0) {
      if (image[g] != static_cast<std::int64_t>(sp)) return false;
      continue;
    }
    image[g] = sp;
    work.emplace_back(g, sp);
  }
  while (!work.empty()) {
    auto [g, s] = work.back();
    work.pop_back();
    if (!sig.subsumes(general.node(g).type, specific.node(s).type)) return false;
    for (const auto& [f, gt] : general.node(g).arcs) {
      auto st = specific.node(s).arc(f);
      if (!st) return false;
      if (image[gt] >= 0) {
        if (image[gt] != static_cast<std::int64_t>(*st)) return false;
        continue;
      }
      image[gt] = *st;
      work.emplace_back(gt, *st);
    }
  }
  return true;
}

FeatureStructure restrict(const FeatureStructure& fs, std::span<const Path> paths) {
  using Node = FeatureStructure::Node;
  std::vector<Node> out;
  std::unordered_map<NodeId, NodeId> image;
  auto copy = [&](NodeId x) {
    auto [it, fresh] = image.try_emplace(x, static_cast<NodeId>(out.size()));
    if (fresh) {
      Node n;
      n.type = fs.node(x).type;
      n.bound = fs.node(x).bound;
      out.push_back(std::move(n));
    }
    return it->second;
  };
  auto link = [&](NodeId from, FeatureId f, NodeId to) {
    auto& arcs = out[from].arcs;
    auto pos = std::lower_bound(arcs.begin(), arcs.end(), f, [](const auto& a, FeatureId g) { return a.first < g; });
    if (pos == arcs.end() || pos->first != f) arcs.insert(pos, {f, to});
  };
  std::vector<char> expanded(fs.node_count(), 0);
  copy(fs.root());
  for (const auto& path : paths) {
    NodeId cur = fs.root();
    bool ok = true;
    for (FeatureId f : path) {
      auto next = fs.node(cur).arc(f);
      if (!next) {
        ok = false;
        break;
      }
      link(copy(cur), f, copy(*next));
      cur = *next;
    }
    if (!ok || expanded[cur]) continue;
    std::vector<NodeId> stack{cur};
    expanded[cur] = 1;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      for (const auto& [f, y] : fs.node(x).arcs) {
        link(copy(x), f, copy(y));
        if (!expanded[y]) {
          expanded[y] = 1;
          stack.push_back(y);
        }
      }
    }
  }
  return FeatureStructure(fs.sig_ptr(), std::move(out), {0});
}

FeatureStructure mark_bound(const FeatureStructure& fs, std::span<const Path> paths) {
  auto nodes = fs.nodes();
  for (const auto& p : paths) {
    auto target = fs.resolve(p);
    if (!target) throw PathError("path " + format_path(fs.sig(), p) + " does not exist");
    nodes[*target].bound = true;
  }
  return FeatureStructure(fs.sig_ptr(), std::move(nodes), fs.roots());
}

bool is_bound(const FeatureStructure& fs, std::span<const FeatureId> path) {
  auto target = fs.resolve(path);
  if (!target) throw PathError("path " + format_path(fs.sig(), path) + " does not exist");
  return fs.bound_at(*target);
}

FeatureStructure mark_type_implied(const FeatureStructure& fs) {
  auto nodes = fs.nodes();
  for (auto& n : nodes)
    if (fs.sig().is_atomic(n.type)) n.bound = true;
  return FeatureStructure(fs.sig_ptr(), std::move(nodes), fs.roots());
}

FeatureStructure strip_bindings(const FeatureStructure& fs) {
  auto nodes = fs.nodes();
  for (auto& n : nodes) n.bound = false;
  return FeatureStructure(fs.sig_ptr(), std::move(nodes), fs.roots());
}

std::string canonical(const FeatureStructure& fs, bool with_bindings) {
  // Depth-first numbering in arc order is invariant under isomorphism
  // because arcs are sorted by feature id.
  std::vector<std::int64_t> number(fs.node_count(), -1);
  std::int64_t next = 0;
  std::string out;
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId r : fs.roots()) {
    out += '(';
    auto visit = [&](NodeId n) {
      if (number[n] >= 0) {
        out += '#';
        out += std::to_string(number[n]);
        return false;
      }
      number[n] = next++;
      out += std::to_string(fs.node(n).type);
      if (with_bindings && fs.node(n).bound) out += '!';
      return true;
    };
    if (visit(r)) stack.emplace_back(r, 0);
    while (!stack.empty()) {
      auto& [n, cursor] = stack.back();
      const auto& arcs = fs.node(n).arcs;
      if (cursor == arcs.size()) {
        out += ';';
        stack.pop_back();
        continue;
      }
      auto [f, t] = arcs[cursor++];
      out += ' ';
      out += std::to_string(f);
      out += ':';
      if (visit(t)) stack.emplace_back(t, 0);
    }
    out += ')';
  }
  return out;
}

bool isomorphic(const FeatureStructure& a, const FeatureStructure& b, bool with_bindings) {
  return canonical(a, with_bindings) == canonical(b, with_bindings);
}

std::vector<Path> bound_frontier(const FeatureStructure& fs) {
  std::vector<Path> out;
  std::vector<char> seen(fs.node_count(), 0);
  std::deque<std::pair<NodeId, Path>> queue{{fs.root(), {}}};
  seen[fs.root()] = 1;
  while (!queue.empty()) {
    auto [n, path] = std::move(queue.front());
    queue.pop_front();
    if (fs.bound_at(n)) {
      out.push_back(path);
      continue;
    }
    for (const auto& [f, t] : fs.node(n).arcs) {
      if (seen[t]) continue;
      seen[t] = 1;
      Path p = path;
      p.push_back(f);
      queue.emplace_back(t, std::move(p));
    }
  }
  return out;
}

std::vector<Path> all_paths(const FeatureStructure& fs, std::size_t max_depth) {
  std::vector<Path> out;
  std::deque<std::pair<NodeId, Path>> queue{{fs.root(), {}}};
  while (!queue.empty()) {
    auto [n, path] = std::move(queue.front());
    queue.pop_front();
    if (!path.empty()) out.push_back(path);
    if (path.size() == max_depth) continue;
    for (const auto& [f, t] : fs.node(n).arcs) {
      Path p = path;
      p.push_back(f);
      queue.emplace_back(t, std::move(p));
    }
  }
  return out;
}

bool is_well_typed(const FeatureStructure& fs) {
  const auto& sig = fs.sig();
  for (const auto& n : fs.nodes())
    for (const auto& [f, t] : n.arcs) {
      auto r = sig.appropriate(n.type, f);
      if (!r || !sig.subsumes(*r, fs.node(t).type)) return false;
    }
  return true;
}

bool bindings_closed(const FeatureStructure& fs) {
  for (const auto& n : fs.nodes())
    if (n.bound)
      for (const auto& arc : n.arcs)
        if (!fs.node(arc.second).bound) return false;
  return true;
}

bool is_acyclic(const FeatureStructure& fs) {
  std::vector<char> colour(fs.node_count(), 0);
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId r : fs.roots()) {
    if (colour[r]) continue;
    colour[r] = 1;
    stack.emplace_back(r, 0);
    while (!stack.empty()) {
      auto& [n, cursor] = stack.back();
      const auto& arcs = fs.node(n).arcs;
      if (cursor == arcs.size()) {
        colour[n] = 2;
        stack.pop_back();
        continue;
      }
      NodeId t = arcs[cursor++].second;
      if (colour[t] == 1) return false;
      if (colour[t] == 0) {
        colour[t] = 1;
        stack.emplace_back(t, 0);
      }
    }
  }
  return true;
}

Path parse_path(const TypeHierarchy& sig, std::string_view text) {
  Path p;
  while (!text.empty()) {
    auto bar = text.find('|');
    auto piece = text.substr(0, bar);
    if (piece.empty()) throw PathError("empty feature in path");
    auto f = sig.find_feature(piece);
    if (!f) throw PathError("unknown feature " + std::string(piece) + " in path");
    p.push_back(*f);
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return p;
}

std::string format_path(const TypeHierarchy& sig, std::span<const FeatureId> path) {
  if (path.empty()) return "<root>";
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '|';
    out += sig.feature_name(path[i]);
  }
  return out;
}

}  // namespace tfsprime
