#include "unify_engine.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

namespace tfsprime::detail {

NodeId GraphUnifier::append(const FeatureStructure& fs) {
  auto offset = static_cast<NodeId>(nodes_.size());
  for (const auto& n : fs.nodes()) {
    Node copy = n;
    for (auto& arc : copy.arcs) arc.second += offset;
    nodes_.push_back(std::move(copy));
    parent_.push_back(static_cast<NodeId>(parent_.size()));
  }
  return offset;
}

NodeId GraphUnifier::add_node(Node node) {
  nodes_.push_back(std::move(node));
  parent_.push_back(static_cast<NodeId>(parent_.size()));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId GraphUnifier::find(NodeId x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool GraphUnifier::merge(NodeId x, NodeId y, const Path& at) {
  if (failed_) return false;
  std::vector<std::tuple<NodeId, NodeId, Path>> work;
  work.emplace_back(x, y, at);
  while (!work.empty()) {
    auto [a, b, path] = std::move(work.back());
    work.pop_back();
    NodeId ra = find(a), rb = find(b);
    if (ra == rb) continue;
    auto m = sig_->meet(nodes_[ra].type, nodes_[rb].type);
    if (!m) {
      failed_ = true;
      clash_path_ = path;
      reason_ = "type clash: " + sig_->name(nodes_[ra].type) + " vs " + sig_->name(nodes_[rb].type);
      return false;
    }
    parent_[rb] = ra;
    Node& keep = nodes_[ra];
    Node gone = std::move(nodes_[rb]);
    nodes_[rb].arcs.clear();
    keep.type = *m;
    keep.bound = keep.bound || gone.bound;
    for (const auto& [f, target] : gone.arcs) {
      auto it = std::lower_bound(keep.arcs.begin(), keep.arcs.end(), std::make_pair(f, NodeId{0}),
                                 [](const auto& l, const auto& r) { return l.first < r.first; });
      if (it != keep.arcs.end() && it->first == f) {
        Path sub = path;
        sub.push_back(f);
        work.emplace_back(it->second, target, std::move(sub));
      } else {
        keep.arcs.insert(it, {f, target});
      }
    }
  }
  return true;
}

bool GraphUnifier::infer_types() {
  if (failed_) return false;
  const auto& sig = *sig_;
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
      if (find(id) != id) continue;
      for (std::size_t k = 0; k < nodes_[id].arcs.size(); ++k) {
        auto [f, target] = nodes_[id].arcs[k];
        auto restriction = sig.appropriate(nodes_[id].type, f);
        if (!restriction) {
          auto m = sig.meet(nodes_[id].type, sig.introducer(f));
          if (!m || !sig.appropriate(*m, f)) {
            failed_ = true;
            clash_node_ = id;
            reason_ = "feature " + sig.feature_name(f) + " is not appropriate for type " + sig.name(nodes_[id].type);
            return false;
          }
          nodes_[id].type = *m;
          restriction = sig.appropriate(*m, f);
          changed = true;
        }
        NodeId rt = find(target);
        auto narrowed = sig.meet(nodes_[rt].type, *restriction);
        if (!narrowed) {
          failed_ = true;
          clash_node_ = rt;
          reason_ = "value of feature " + sig.feature_name(f) + " must be " + sig.name(*restriction) + ", found " +
                    sig.name(nodes_[rt].type);
          return false;
        }
        if (*narrowed != nodes_[rt].type) {
          nodes_[rt].type = *narrowed;
          changed = true;
        }
      }
    }
  }
  return true;
}

Path GraphUnifier::path_to(NodeId target, const std::vector<NodeId>& roots) {
  std::vector<std::optional<Path>> seen(nodes_.size());
  std::deque<NodeId> queue;
  for (NodeId r : roots) {
    NodeId rr = find(r);
    if (!seen[rr]) {
      seen[rr] = Path{};
      queue.push_back(rr);
    }
  }
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    if (n == find(target)) return *seen[n];
    for (const auto& [f, t] : nodes_[n].arcs) {
      NodeId rt = find(t);
      if (seen[rt]) continue;
      Path p = *seen[n];
      p.push_back(f);
      seen[rt] = std::move(p);
      queue.push_back(rt);
    }
  }
  return {};
}

UnifyResult GraphUnifier::failure() const {
  UnifyResult r;
  r.clash_path = clash_path_;
  r.reason = reason_;
  r.cycle = cycle_;
  return r;
}

UnifyResult GraphUnifier::finish(const std::vector<NodeId>& roots) {
  if (failed_) {
    if (clash_node_) clash_path_ = path_to(*clash_node_, roots);
    return failure();
  }
  // Compact in depth-first order from the roots, rejecting cycles.
  std::vector<std::int64_t> remap(nodes_.size(), -1);
  std::vector<char> colour(nodes_.size(), 0);  // 0 white, 1 on stack, 2 done
  std::vector<Node> out;
  std::vector<NodeId> new_roots;
  for (NodeId r : roots) {
    NodeId start = find(r);
    if (colour[start] == 2) {
      new_roots.push_back(static_cast<NodeId>(remap[start]));
      continue;
    }
    // Iterative DFS with explicit arc cursor.
    std::vector<std::pair<NodeId, std::size_t>> stack;
    auto enter = [&](NodeId n) {
      colour[n] = 1;
      remap[n] = static_cast<std::int64_t>(out.size());
      Node copy;
      copy.type = nodes_[n].type;
      copy.bound = nodes_[n].bound;
      out.push_back(std::move(copy));
      stack.emplace_back(n, 0);
    };
    enter(start);
    while (!stack.empty()) {
      auto& [n, cursor] = stack.back();
      if (cursor == nodes_[n].arcs.size()) {
        colour[n] = 2;
        stack.pop_back();
        continue;
      }
      auto [f, t] = nodes_[n].arcs[cursor++];
      NodeId rt = find(t);
      NodeId owner = n;
      if (colour[rt] == 1) {
        failed_ = true;
        cycle_ = true;
        clash_path_ = path_to(rt, roots);
        reason_ = "unification would create a cyclic structure";
        return failure();
      }
      if (colour[rt] == 0) enter(rt);
      out[static_cast<std::size_t>(remap[owner])].arcs.emplace_back(f, static_cast<NodeId>(remap[rt]));
    }
    new_roots.push_back(static_cast<NodeId>(remap[start]));
  }
  for (auto& n : out) std::sort(n.arcs.begin(), n.arcs.end());
  UnifyResult r;
  r.value = FeatureStructure(sig_, std::move(out), std::move(new_roots));
  return r;
}

}  // namespace tfsprime::detail
