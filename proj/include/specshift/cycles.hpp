#ifndef SPECSHIFT_CYCLES_HPP
#define SPECSHIFT_CYCLES_HPP

#include <cstdint>
#include <vector>

#include "specshift/dataset.hpp"
#include "specshift/graph.hpp"
#include "specshift/rng.hpp"

namespace specshift {

/// One basis cycle: its edges in walk order, so consecutive edges share a
/// node and the last edge closes back to the first. Vertices are distinct.
struct Cycle {
  std::vector<Edge> edges;

  int length() const { return static_cast<int>(edges.size()); }
  /// Distinct vertices of the cycle, ascending.
  std::vector<int> nodes() const;
};

/// Fundamental cycle basis; |cycles| equals the circuit rank
/// |E| - N + #components.
struct CycleBasis {
  std::vector<Cycle> cycles;

  int size() const { return static_cast<int>(cycles.size()); }
  bool empty() const { return cycles.empty(); }
};

/// Paton-style fundamental basis: a spanning forest is grown by BFS from
/// the lowest-id node of each component (sorted neighbor order), and each
/// non-tree edge closes exactly one cycle through tree paths. Chords are
/// processed in ascending normalized edge order.
CycleBasis cycle_basis(const Graph& g);

/// Removes exactly one edge per basis cycle so that the result is acyclic
/// and has the same number of connected components, backtracking over edge
/// choices when necessary. Throws DataError("cycle breaking infeasible")
/// when no choice works.
Graph break_cycles(const Graph& g);

/// For every cycle of the (once-computed) basis: removes one random edge of
/// that cycle still present, adds a new node replicating the feature row of
/// the cycle's minimum-degree node (ties to the lowest id), and connects the
/// new node to both removed-edge endpoints. Cycles with no remaining edge
/// are skipped; `skipped` (when non-null) receives the skip count.
Graph add_one_cycle_length(const Graph& g, Rng& rng, int* skipped = nullptr);

/// Applies `increments` successive add_one_cycle_length passes (basis
/// recomputed before each) to every graph whose index i satisfies
/// i % skip_ratio == 0; other graphs pass through untouched.
Dataset align_cycle_lengths(const Dataset& d, std::int64_t skip_ratio,
                            int increments, Rng& rng);

/// N x 2 matrix: column 0 is the basis-cycle membership indicator, column 1
/// the average length of the basis cycles containing the node (0 if none).
Matrix node_cycle_features(const Graph& g);

struct CycleLengthStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

/// Mean/std across graphs of the per-graph average basis-cycle length;
/// graphs with an empty basis are excluded. Throws DataError when every
/// basis is empty.
CycleLengthStats cycle_length_stats(const Dataset& d);

/// Adds `count` nodes sequentially, each joined to two distinct uniformly
/// random existing nodes, with the feature row replicated from a uniformly
/// random existing node. The random-addition ablation counterpart of
/// cycle-length alignment.
Graph add_random_nodes(const Graph& g, int count, Rng& rng);

}  // namespace specshift

#endif
