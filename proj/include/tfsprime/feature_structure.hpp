#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tfsprime/type_hierarchy.hpp"

namespace tfsprime {

using NodeId = std::uint32_t;
using Path = std::vector<FeatureId>;

/// Thrown when a path does not exist in a structure.
class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A typed feature graph with one or more distinguished roots.
///
/// Categories and lexical entries have a single root.  Rule bodies have one
/// root for the mother followed by one per daughter, so structure sharing
/// between mother and daughters is ordinary reentrancy.  Every node carries a
/// binding flag; reachable-from-bound nodes are always bound (the constructor
/// and every operation re-establish this).  Values are immutable: operations
/// return new structures.
class FeatureStructure {
 public:
  struct Node {
    TypeId type = 0;
    bool bound = false;
    std::vector<std::pair<FeatureId, NodeId>> arcs;  // sorted by feature

    std::optional<NodeId> arc(FeatureId f) const {
      for (const auto& [feat, target] : arcs)
        if (feat == f) return target;
      return std::nullopt;
    }
  };

  FeatureStructure() = default;
  /// A single node of the given type (top by default).
  explicit FeatureStructure(HierarchyPtr sig, std::optional<TypeId> type = std::nullopt);
  /// Assembles a structure from raw parts.  Nodes unreachable from the roots
  /// are dropped and binding closure is applied; arcs are not type checked.
  FeatureStructure(HierarchyPtr sig, std::vector<Node> nodes, std::vector<NodeId> roots);

  const TypeHierarchy& sig() const { return *sig_; }
  const HierarchyPtr& sig_ptr() const { return sig_; }
  bool empty() const { return nodes_.empty(); }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t root_count() const { return roots_.size(); }
  NodeId root(std::size_t i = 0) const { return roots_.at(i); }
  const std::vector<NodeId>& roots() const { return roots_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  TypeId type() const { return nodes_[roots_.front()].type; }

  std::optional<NodeId> follow(NodeId from, std::span<const FeatureId> path) const;
  std::optional<NodeId> resolve(std::span<const FeatureId> path, std::size_t root_index = 0) const {
    return follow(root(root_index), path);
  }

  /// Single-rooted copy of everything reachable from roots()[root_index].
  FeatureStructure extract(std::size_t root_index) const;
  /// Single-rooted copy of everything reachable from an arbitrary node.
  FeatureStructure extract_node(NodeId node) const;

  /// Flag set explicitly or implied by an atomic type.
  bool bound_at(NodeId id) const;

 private:
  HierarchyPtr sig_;
  std::vector<Node> nodes_;
  std::vector<NodeId> roots_;
};

/// Outcome of a unification: a structure, or the clash that prevented one.
struct UnifyResult {
  std::optional<FeatureStructure> value;
  Path clash_path;
  std::string reason;
  bool cycle = false;

  explicit operator bool() const { return value.has_value(); }
  const FeatureStructure& operator*() const { return *value; }
  const FeatureStructure* operator->() const { return &*value; }
};

/// Most general structure subsumed by both (root 0 of each).  Binding flags
/// are or-ed over contributing nodes and then closed downward.
UnifyResult unify(const FeatureStructure& a, const FeatureStructure& b);
/// Unifies root 0 of `category` into node `at` of `target`, keeping target's roots.
UnifyResult unify_at(const FeatureStructure& target, NodeId at, const FeatureStructure& category);
/// Unifies `category` into target's root `root_index` (a rule daughter or mother).
UnifyResult unify_root(const FeatureStructure& target, std::size_t root_index, const FeatureStructure& category);

/// Most specific structure subsuming both, root by root.  Bound iff bound in
/// both inputs.
FeatureStructure generalize(const FeatureStructure& a, const FeatureStructure& b);
/// Left fold of generalize(); nullopt for an empty range.
std::optional<FeatureStructure> generalize_all(std::span<const FeatureStructure> items);

/// True iff `general` subsumes `specific` (binding flags ignored), matching
/// roots pairwise.
bool subsumes(const FeatureStructure& general, const FeatureStructure& specific);

/// Keeps the types met along each path and the whole subtree at its end;
/// every other arc is dropped.  The result always subsumes `fs`.
FeatureStructure restrict(const FeatureStructure& fs, std::span<const Path> paths);

FeatureStructure mark_bound(const FeatureStructure& fs, std::span<const Path> paths);
bool is_bound(const FeatureStructure& fs, std::span<const FeatureId> path);
/// Sets the flag on every node whose atomic type already implies boundness.
FeatureStructure mark_type_implied(const FeatureStructure& fs);
/// Clears every binding flag.
FeatureStructure strip_bindings(const FeatureStructure& fs);

/// Canonical text: identical for isomorphic structures, different otherwise.
std::string canonical(const FeatureStructure& fs, bool with_bindings = true);
bool isomorphic(const FeatureStructure& a, const FeatureStructure& b, bool with_bindings = true);

/// Paths from root 0 to each node whose flag is set and whose parents are not
/// all bound; together they cover every bound node.
std::vector<Path> bound_frontier(const FeatureStructure& fs);
/// Every path from root 0 (shortest first), up to `max_depth` features.
std::vector<Path> all_paths(const FeatureStructure& fs, std::size_t max_depth);

/// Consistency checks used by tests and debug assertions.
bool is_well_typed(const FeatureStructure& fs);
bool bindings_closed(const FeatureStructure& fs);
bool is_acyclic(const FeatureStructure& fs);

Path parse_path(const TypeHierarchy& sig, std::string_view text);  // "cont|nucleus|arg"
std::string format_path(const TypeHierarchy& sig, std::span<const FeatureId> path);

}  // namespace tfsprime
