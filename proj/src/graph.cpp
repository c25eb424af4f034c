#include "specshift/graph.hpp"

#include <algorithm>
#include <string>

#include "specshift/errors.hpp"

namespace specshift {

namespace {

Edge normalize(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

std::vector<std::vector<int>> build_adjacency(int n,
                                              const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

}  // namespace

Graph Graph::from_edge_list(int node_count, const std::vector<Edge>& edges) {
  if (node_count < 0) throw DataError("node index out of range");
  std::vector<Edge> normalized;
  normalized.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= node_count || v < 0 || v >= node_count)
      throw DataError("node index out of range: (" + std::to_string(u) + ", " +
                      std::to_string(v) + ") with n=" +
                      std::to_string(node_count));
    if (u == v)
      throw DataError("self-loop rejected: node " + std::to_string(u));
    normalized.push_back(normalize(u, v));
  }
  std::sort(normalized.begin(), normalized.end());
  normalized.erase(std::unique(normalized.begin(), normalized.end()),
                   normalized.end());

  Graph g;
  g.node_count_ = node_count;
  g.edges_ = std::move(normalized);
  g.adjacency_ = build_adjacency(node_count, g.edges_);
  return g;
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_) return false;
  const auto& nbrs = adjacency_[u];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Graph Graph::with_features(Matrix features) const {
  if (features.rows != node_count_)
    throw DataError("feature matrix must have one row per node");
  Graph g = *this;
  g.features_ = std::move(features);
  return g;
}

Graph Graph::with_label(int label) const {
  Graph g = *this;
  g.label_ = label;
  return g;
}

ComponentLabeling connected_components(const Graph& g) {
  const int n = g.node_count();
  ComponentLabeling out;
  out.labels.assign(n, -1);
  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    if (out.labels[root] != -1) continue;
    const int id = out.count++;
    out.labels[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : g.neighbors(v)) {
        if (out.labels[w] == -1) {
          out.labels[w] = id;
          stack.push_back(w);
        }
      }
    }
  }
  return out;
}

std::vector<int> degree_vector(const Graph& g) {
  std::vector<int> deg(g.node_count(), 0);
  for (const auto& [u, v] : g.edges()) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

GraphBuilder::GraphBuilder(const Graph& g)
    : node_count_(g.node_count()), edges_(g.edges()), label_(g.label()) {
  if (g.features()) {
    feature_width_ = g.features()->cols;
    feature_data_ = g.features()->data;
  }
}

GraphBuilder::GraphBuilder(int node_count) : node_count_(node_count) {
  if (node_count < 0) throw DataError("node index out of range");
}

int GraphBuilder::add_node(std::span<const double> feature_row) {
  if (feature_width_) {
    if (static_cast<int>(feature_row.size()) != *feature_width_)
      throw DataError("feature row width mismatch on add_node");
    feature_data_.insert(feature_data_.end(), feature_row.begin(),
                         feature_row.end());
  }
  return node_count_++;
}

void GraphBuilder::add_edge(int u, int v) {
  if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_)
    throw DataError("node index out of range: (" + std::to_string(u) + ", " +
                    std::to_string(v) + ")");
  if (u == v) throw DataError("self-loop rejected: node " + std::to_string(u));
  Edge e = u < v ? Edge{u, v} : Edge{v, u};
  if (std::find(edges_.begin(), edges_.end(), e) == edges_.end())
    edges_.push_back(e);
}

bool GraphBuilder::remove_edge(int u, int v) {
  Edge e = u < v ? Edge{u, v} : Edge{v, u};
  auto it = std::find(edges_.begin(), edges_.end(), e);
  if (it == edges_.end()) return false;
  edges_.erase(it);
  return true;
}

bool GraphBuilder::has_edge(int u, int v) const {
  Edge e = u < v ? Edge{u, v} : Edge{v, u};
  return std::find(edges_.begin(), edges_.end(), e) != edges_.end();
}

Graph GraphBuilder::build() const {
  Graph g = Graph::from_edge_list(node_count_, edges_);
  if (feature_width_) {
    Matrix f(node_count_, *feature_width_);
    f.data = feature_data_;
    g.features_ = std::move(f);
  }
  g.label_ = label_;
  return g;
}

}  // namespace specshift
