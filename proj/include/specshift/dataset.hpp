#ifndef SPECSHIFT_DATASET_HPP
#define SPECSHIFT_DATASET_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "specshift/graph.hpp"

namespace specshift {

/// Ordered graph collection with contiguous 0-based class labels and a
/// uniform feature width (or no features at all).
struct Dataset {
  std::vector<Graph> graphs;
  std::string name;
  int class_count = 0;

  int size() const { return static_cast<int>(graphs.size()); }
  /// Feature width shared by all graphs; -1 when features are absent.
  int feature_width() const;
};

/// Parses the public TUDataset text layout from `directory`:
///   NAME_A.txt               comma-separated 1-indexed edge endpoints
///   NAME_graph_indicator.txt 1-indexed graph id per node line
///   NAME_graph_labels.txt    one label per graph
///   NAME_node_labels.txt     optional integer per node (one-hot encoded)
///   NAME_node_attributes.txt optional comma-separated reals per node
/// Node labels one-hot over the sorted label vocabulary; attributes are
/// appended after the one-hot block. Graph labels are remapped to
/// contiguous 0-based ids preserving sorted original order.
Dataset parse_tudataset(const std::filesystem::path& directory,
                        const std::string& name);

/// JSONL dataset: one object per line,
///   {"n": int, "edges": [[u,v],...], "label": int,
///    "features": [[...],...]}        (features optional)
Dataset parse_jsonl(const std::filesystem::path& path);
void write_jsonl(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace specshift

#endif
