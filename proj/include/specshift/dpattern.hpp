#ifndef SPECSHIFT_DPATTERN_HPP
#define SPECSHIFT_DPATTERN_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "specshift/graph.hpp"

namespace specshift {

/// Exact string-keyed interner for canonical pattern descriptors. Ids are
/// comparable across graphs sharing one interner, and collisions are
/// impossible by construction.
class PatternInterner {
 public:
  int intern(const std::string& canonical);
  int size() const { return static_cast<int>(ids_.size()); }

 private:
  std::unordered_map<std::string, int> ids_;
};

/// Per-depth node pattern ids: two nodes share an id at depth d iff their
/// recursively canonicalized d-patterns are structurally identical. Depth
/// d refines depth d-1 (classes never merge as depth grows).
struct PatternTable {
  std::vector<std::vector<int>> ids_by_depth;  // [depth][node]

  int depth_count() const { return static_cast<int>(ids_by_depth.size()); }
  /// Number of distinct pattern classes at one depth.
  int class_count(int depth) const;
};

/// Depth 0 is the node color; depth d is the canonical form of (own
/// (d-1)-id, sorted multiset of (neighbor (d-1)-id, count)). The interner
/// argument makes ids comparable across graphs.
PatternTable d_patterns(const Graph& g, const std::vector<int>& colors,
                        int d_max, PatternInterner& interner);
PatternTable d_patterns(const Graph& g, const std::vector<int>& colors,
                        int d_max);

/// True iff for every depth <= d_max, every node of every cycle graph C_n
/// (n in n_values, uniform colors) maps to one global pattern id.
bool verify_cycle_lemma(const std::vector<int>& n_values, int d_max);

/// For each depth, whether every mapped node pair (a in gA, b in gB)
/// shares a pattern id under one shared interner.
std::vector<bool> compare_patterns(const Graph& ga, const Graph& gb,
                                   const std::vector<int>& colors_a,
                                   const std::vector<int>& colors_b,
                                   const std::vector<std::pair<int, int>>& id_map,
                                   int d_max);

}  // namespace specshift

#endif
