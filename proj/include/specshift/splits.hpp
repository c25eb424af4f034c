#ifndef SPECSHIFT_SPLITS_HPP
#define SPECSHIFT_SPLITS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "specshift/dataset.hpp"

namespace specshift {

/// Size-stratified splits: train/val/small_test come from the smallest-half
/// pool, large_test takes the per-class largest graphs outside the pool so
/// that small_test and large_test share identical per-class counts.
struct SplitBundle {
  std::vector<int> train, val, small_test, large_test;

  /// Per-class counts of one split under a dataset's labels.
  static std::map<int, int> class_counts(const std::vector<int>& indices,
                                         const Dataset& d);
};

struct SplitRatios {
  double train = 0.7;
  double val = 0.15;
  double small_test = 0.15;
};

/// Builds the four splits. Graphs are sorted ascending by node count (ties
/// by index); the smallest half forms the pool. Within the pool each class
/// is shuffled with the run seed and cut as train = floor(train_ratio * n),
/// small_test = floor(small_test_ratio * n), val = remainder. large_test
/// selects per class, descending by size and skipping pool members, as many
/// graphs as small_test holds. Throws DataError("class <c> cannot satisfy
/// split") when a class is missing from the pool or runs out of large
/// graphs.
SplitBundle make_size_splits(const Dataset& d, SplitRatios ratios,
                             std::uint64_t seed);

/// Per class: (fraction of graphs selected, integer duplication ratio).
struct UpsampleEntry {
  double fraction = 1.0;
  int ratio = 1;
};
using UpsampleSpec = std::map<int, UpsampleEntry>;

/// For each class in the spec, a seeded uniform sample of
/// floor(fraction * n_class) training graphs is duplicated (ratio - 1)
/// extra times. Output is the original index list followed by duplicates.
std::vector<int> upsample(const std::vector<int>& train_indices,
                          const std::vector<int>& labels,
                          const UpsampleSpec& spec, std::uint64_t seed);

/// Four-section text format: `[train]` etc. headers, one index per line.
void write_splits(const SplitBundle& splits,
                  const std::filesystem::path& path);
SplitBundle read_splits(const std::filesystem::path& path);

}  // namespace specshift

#endif
