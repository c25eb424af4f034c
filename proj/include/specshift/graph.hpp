#ifndef SPECSHIFT_GRAPH_HPP
#define SPECSHIFT_GRAPH_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "specshift/matrix.hpp"

namespace specshift {

using Edge = std::pair<int, int>;  // normalized so first < second

/// Immutable undirected simple graph. Edges are deduplicated and stored
/// normalized (u < v); adjacency is kept as sorted neighbor lists so that
/// every traversal in the toolkit iterates in a deterministic order.
/// Optional per-node feature rows and an optional class label ride along.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an edge list. Edges are normalized and
  /// deduplicated (the datasets store both directions of each edge).
  /// Throws DataError on out-of-range endpoints or self-loops.
  static Graph from_edge_list(int node_count, const std::vector<Edge>& edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Normalized unique edges in ascending (u, v) order.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Sorted neighbor list of node v.
  const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }

  bool has_edge(int u, int v) const;

  const std::optional<Matrix>& features() const { return features_; }
  const std::optional<int>& label() const { return label_; }

  /// Value-returning attachment of features/label (graphs stay immutable).
  Graph with_features(Matrix features) const;
  Graph with_label(int label) const;

 private:
  friend class GraphBuilder;

  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::optional<Matrix> features_;
  std::optional<int> label_;
};

/// Connected-component labeling: `labels[v]` is the component id of node v,
/// ids contiguous from 0 in order of first appearance by lowest node id.
struct ComponentLabeling {
  int count = 0;
  std::vector<int> labels;
};

ComponentLabeling connected_components(const Graph& g);

/// Per-node degree (number of incident edges).
std::vector<int> degree_vector(const Graph& g);

/// Explicit mutable builder; the analysis pipeline never mutates a shared
/// Graph in place, it edits a builder and produces a new value.
class GraphBuilder {
 public:
  explicit GraphBuilder(const Graph& g);
  explicit GraphBuilder(int node_count);

  int node_count() const { return node_count_; }

  /// Appends a node; `feature_row` must match the feature width when the
  /// source graph carries features. Returns the new node id.
  int add_node(std::span<const double> feature_row = {});

  void add_edge(int u, int v);
  /// Removes (u, v) if present; returns whether it was.
  bool remove_edge(int u, int v);
  bool has_edge(int u, int v) const;

  Graph build() const;

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;  // kept normalized, unsorted until build
  std::optional<int> feature_width_;
  std::vector<double> feature_data_;  // row-major
  std::optional<int> label_;
};

}  // namespace specshift

#endif
