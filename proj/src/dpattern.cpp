#include "specshift/dpattern.hpp"

#include <algorithm>
#include <map>

#include "specshift/errors.hpp"

namespace specshift {

int PatternInterner::intern(const std::string& canonical) {
  auto [it, inserted] =
      ids_.try_emplace(canonical, static_cast<int>(ids_.size()));
  return it->second;
}

int PatternTable::class_count(int depth) const {
  std::vector<int> ids = ids_by_depth[depth];
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return static_cast<int>(ids.size());
}

PatternTable d_patterns(const Graph& g, const std::vector<int>& colors,
                        int d_max, PatternInterner& interner) {
  const int n = g.node_count();
  if (static_cast<int>(colors.size()) != n)
    throw DataError("color vector must have one entry per node");
  if (d_max < 0) throw DataError("pattern depth must be nonnegative");

  PatternTable table;
  table.ids_by_depth.reserve(d_max + 1);

  std::vector<int> current(n);
  for (int v = 0; v < n; ++v)
    current[v] = interner.intern("c" + std::to_string(colors[v]));
  table.ids_by_depth.push_back(current);

  for (int depth = 1; depth <= d_max; ++depth) {
    std::vector<int> next(n);
    for (int v = 0; v < n; ++v) {
      std::map<int, int> neighbor_counts;
      for (int w : g.neighbors(v)) ++neighbor_counts[current[w]];
      std::string canonical = "(" + std::to_string(current[v]) + "|";
      for (const auto& [id, count] : neighbor_counts)
        canonical += std::to_string(id) + ":" + std::to_string(count) + ",";
      canonical += ")";
      next[v] = interner.intern(canonical);
    }
    table.ids_by_depth.push_back(next);
    current = std::move(next);
  }
  return table;
}

PatternTable d_patterns(const Graph& g, const std::vector<int>& colors,
                        int d_max) {
  PatternInterner interner;
  return d_patterns(g, colors, d_max, interner);
}

bool verify_cycle_lemma(const std::vector<int>& n_values, int d_max) {
  PatternInterner interner;
  std::vector<PatternTable> tables;
  for (int n : n_values) {
    if (n < 3) throw DataError("cycle graphs need at least 3 nodes");
    std::vector<Edge> edges;
    for (int v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
    const Graph cycle = Graph::from_edge_list(n, edges);
    tables.push_back(
        d_patterns(cycle, std::vector<int>(n, 0), d_max, interner));
  }
  for (int depth = 0; depth <= d_max; ++depth) {
    int expected = -1;
    for (const auto& table : tables)
      for (int id : table.ids_by_depth[depth]) {
        if (expected == -1) expected = id;
        if (id != expected) return false;
      }
  }
  return true;
}

std::vector<bool> compare_patterns(const Graph& ga, const Graph& gb,
                                   const std::vector<int>& colors_a,
                                   const std::vector<int>& colors_b,
                                   const std::vector<std::pair<int, int>>& id_map,
                                   int d_max) {
  PatternInterner interner;
  const PatternTable ta = d_patterns(ga, colors_a, d_max, interner);
  const PatternTable tb = d_patterns(gb, colors_b, d_max, interner);

  std::vector<bool> equal(d_max + 1, true);
  for (int depth = 0; depth <= d_max; ++depth)
    for (const auto& [a, b] : id_map)
      if (ta.ids_by_depth[depth][a] != tb.ids_by_depth[depth][b]) {
        equal[depth] = false;
        break;
      }
  return equal;
}

}  // namespace specshift
