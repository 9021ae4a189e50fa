#pragma once

#include <vector>

#include "tfsprime/feature_structure.hpp"

namespace tfsprime::detail {

/// Union-find unifier over a scratch graph.  Callers load one or more graphs
/// into a shared node array, request merges, then call finish() to obtain a
/// compact, well-typed, acyclic structure over the requested roots.
class GraphUnifier {
 public:
  using Node = FeatureStructure::Node;

  explicit GraphUnifier(HierarchyPtr sig) : sig_(std::move(sig)) {}

  /// Appends a copy of `fs`'s nodes; returns the offset of its node 0.
  NodeId append(const FeatureStructure& fs);
  NodeId add_node(Node node);
  Node& raw(NodeId id) { return nodes_[id]; }

  /// Identifies x and y (and recursively their shared features).
  bool merge(NodeId x, NodeId y, const Path& at = {});
  /// Applies appropriateness: introduces types for features and narrows
  /// feature values to their restrictions.
  bool infer_types();
  UnifyResult finish(const std::vector<NodeId>& roots);

  bool failed() const { return failed_; }
  UnifyResult failure() const;

 private:
  NodeId find(NodeId x);
  Path path_to(NodeId target, const std::vector<NodeId>& roots);

  HierarchyPtr sig_;
  std::vector<Node> nodes_;
  std::vector<NodeId> parent_;
  bool failed_ = false;
  Path clash_path_;
  std::string reason_;
  bool cycle_ = false;
  std::optional<NodeId> clash_node_;
};

}  // namespace tfsprime::detail
