#include "specshift/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>

#include "specshift/errors.hpp"

namespace specshift {

std::vector<int> Cycle::nodes() const {
  std::vector<int> out;
  out.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    out.push_back(u);
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CycleBasis cycle_basis(const Graph& g) {
  const int n = g.node_count();
  std::vector<int> parent(n, -1), depth(n, -1);
  std::vector<bool> visited(n, false);

  // BFS spanning forest, rooted at the lowest-id node of each component.
  std::deque<int> queue;
  for (int root = 0; root < n; ++root) {
    if (visited[root]) continue;
    visited[root] = true;
    depth[root] = 0;
    queue.push_back(root);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : g.neighbors(v)) {
        if (visited[w]) continue;
        visited[w] = true;
        parent[w] = v;
        depth[w] = depth[v] + 1;
        queue.push_back(w);
      }
    }
  }

  std::set<Edge> tree_edges;
  for (int v = 0; v < n; ++v)
    if (parent[v] != -1)
      tree_edges.insert(v < parent[v] ? Edge{v, parent[v]}
                                      : Edge{parent[v], v});

  CycleBasis basis;
  for (const auto& chord : g.edges()) {
    if (tree_edges.count(chord)) continue;
    auto [u, v] = chord;

    // Tree paths from both endpoints up to their lowest common ancestor.
    std::vector<int> path_u{u}, path_v{v};
    int a = u, b = v;
    while (depth[a] > depth[b]) path_u.push_back(a = parent[a]);
    while (depth[b] > depth[a]) path_v.push_back(b = parent[b]);
    while (a != b) {
      path_u.push_back(a = parent[a]);
      path_v.push_back(b = parent[b]);
    }

    Cycle cycle;
    for (std::size_t i = 0; i + 1 < path_u.size(); ++i)
      cycle.edges.push_back({path_u[i], path_u[i + 1]});
    for (std::size_t i = path_v.size() - 1; i > 0; --i)
      cycle.edges.push_back({path_v[i], path_v[i - 1]});
    cycle.edges.push_back({v, u});
    basis.cycles.push_back(std::move(cycle));
  }
  return basis;
}

namespace {

int component_count(int n, const std::vector<Edge>& edges,
                    const std::vector<bool>& present) {
  std::vector<int> root(n);
  for (int i = 0; i < n; ++i) root[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  int count = n;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!present[i]) continue;
    int a = find(edges[i].first), b = find(edges[i].second);
    if (a != b) {
      root[a] = b;
      --count;
    }
  }
  return count;
}

}  // namespace

Graph break_cycles(const Graph& g) {
  CycleBasis basis = cycle_basis(g);
  if (basis.empty()) return g;

  const auto& edges = g.edges();
  std::vector<bool> present(edges.size(), true);
  const auto edge_slot = [&](const Edge& e) {
    return static_cast<std::size_t>(
        std::lower_bound(edges.begin(), edges.end(), e) - edges.begin());
  };
  const int target_components = connected_components(g).count;

  // One edge per basis cycle, kept only if the component count survives.
  std::function<bool(std::size_t)> solve = [&](std::size_t i) -> bool {
    if (i == basis.cycles.size()) return true;
    for (const auto& e : basis.cycles[i].edges) {
      Edge norm = e.first < e.second ? e : Edge{e.second, e.first};
      std::size_t slot = edge_slot(norm);
      if (!present[slot]) continue;
      present[slot] = false;
      if (component_count(g.node_count(), edges, present) ==
              target_components &&
          solve(i + 1))
        return true;
      present[slot] = true;
    }
    return false;
  };
  if (!solve(0)) throw DataError("cycle breaking infeasible");

  std::vector<Edge> kept;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (present[i]) kept.push_back(edges[i]);
  Graph out = Graph::from_edge_list(g.node_count(), kept);
  if (g.features()) out = out.with_features(*g.features());
  if (g.label()) out = out.with_label(*g.label());
  return out;
}

Graph add_one_cycle_length(const Graph& g, Rng& rng, int* skipped) {
  if (skipped) *skipped = 0;
  CycleBasis basis = cycle_basis(g);
  if (basis.empty()) return g;

  GraphBuilder builder(g);
  std::vector<int> degree = degree_vector(g);
  std::vector<std::vector<double>> rows;
  if (g.features())
    for (int r = 0; r < g.features()->rows; ++r) {
      auto span = g.features()->row(r);
      rows.emplace_back(span.begin(), span.end());
    }

  for (const auto& cycle : basis.cycles) {
    std::vector<Edge> candidates;
    for (const auto& e : cycle.edges)
      if (builder.has_edge(e.first, e.second)) candidates.push_back(e);
    if (candidates.empty()) {
      // Shared-edge cycles can lose all their edges to earlier picks.
      if (skipped) ++*skipped;
      continue;
    }
    const Edge pick = candidates[rng.bounded(candidates.size())];

    // argmin-degree node of the cycle in the current graph, lowest id wins.
    int donor = -1;
    for (int v : cycle.nodes())
      if (donor == -1 || degree[v] < degree[donor]) donor = v;

    builder.remove_edge(pick.first, pick.second);
    int fresh;
    if (g.features()) {
      fresh = builder.add_node(rows[donor]);
      rows.push_back(rows[donor]);
    } else {
      fresh = builder.add_node();
    }
    // Endpoint degrees are unchanged: one incident edge swapped for another.
    degree.push_back(2);
    builder.add_edge(pick.first, fresh);
    builder.add_edge(pick.second, fresh);
  }
  return builder.build();
}

Dataset align_cycle_lengths(const Dataset& d, std::int64_t skip_ratio,
                            int increments, Rng& rng) {
  if (skip_ratio < 1) throw DataError("skip ratio must be positive");
  if (increments < 1) throw DataError("increment count must be positive");
  Dataset out;
  out.name = d.name;
  out.class_count = d.class_count;
  out.graphs.reserve(d.graphs.size());
  for (std::size_t i = 0; i < d.graphs.size(); ++i) {
    if (static_cast<std::int64_t>(i) % skip_ratio == 0) {
      Graph g = d.graphs[i];
      for (int j = 0; j < increments; ++j) g = add_one_cycle_length(g, rng);
      out.graphs.push_back(std::move(g));
    } else {
      out.graphs.push_back(d.graphs[i]);
    }
  }
  return out;
}

Matrix node_cycle_features(const Graph& g) {
  const int n = g.node_count();
  Matrix features(n, 2);
  std::vector<int> count(n, 0);
  std::vector<double> length_sum(n, 0.0);
  for (const auto& cycle : cycle_basis(g).cycles) {
    const int len = cycle.length();
    for (int v : cycle.nodes()) {
      ++count[v];
      length_sum[v] += len;
    }
  }
  for (int v = 0; v < n; ++v) {
    if (count[v] > 0) {
      features(v, 0) = 1.0;
      features(v, 1) = length_sum[v] / count[v];
    }
  }
  return features;
}

CycleLengthStats cycle_length_stats(const Dataset& d) {
  std::vector<double> averages;
  for (const auto& g : d.graphs) {
    const CycleBasis basis = cycle_basis(g);
    if (basis.empty()) continue;
    double sum = 0.0;
    for (const auto& c : basis.cycles) sum += c.length();
    averages.push_back(sum / basis.size());
  }
  if (averages.empty()) throw DataError("no cyclic graphs in dataset");

  CycleLengthStats stats;
  for (double a : averages) stats.mean += a;
  stats.mean /= static_cast<double>(averages.size());
  double var = 0.0;
  for (double a : averages) var += (a - stats.mean) * (a - stats.mean);
  stats.std = std::sqrt(var / static_cast<double>(averages.size()));
  return stats;
}

Graph add_random_nodes(const Graph& g, int count, Rng& rng) {
  if (count < 0) throw DataError("node count must be nonnegative");
  if (count == 0) return g;
  if (g.node_count() < 2)
    throw DataError("graph too small for random attachment");

  GraphBuilder builder(g);
  std::vector<std::vector<double>> rows;
  if (g.features())
    for (int r = 0; r < g.features()->rows; ++r) {
      auto span = g.features()->row(r);
      rows.emplace_back(span.begin(), span.end());
    }

  for (int k = 0; k < count; ++k) {
    const int n = builder.node_count();
    // Draw order per node: first attachment, second attachment, feature donor.
    int a = static_cast<int>(rng.bounded(n));
    int b = static_cast<int>(rng.bounded(n - 1));
    if (b >= a) ++b;
    int donor = static_cast<int>(rng.bounded(n));
    int fresh;
    if (g.features()) {
      fresh = builder.add_node(rows[donor]);
      rows.push_back(rows[donor]);
    } else {
      fresh = builder.add_node();
    }
    builder.add_edge(a, fresh);
    builder.add_edge(b, fresh);
  }
  return builder.build();
}

}  // namespace specshift
