#include "specshift/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "specshift/errors.hpp"

namespace specshift {

namespace fs = std::filesystem;
using nlohmann::json;

int Dataset::feature_width() const {
  for (const auto& g : graphs)
    if (g.features()) return g.features()->cols;
  return -1;
}

namespace {

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("dataset file missing: " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Trailing blank lines are common in the public dumps.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<double> parse_csv_row(const std::string& line,
                                  const std::string& context) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw DataError("unparsable number in " + context + ": '" + cell + "'");
    }
  }
  return values;
}

long parse_long(const std::string& s, const std::string& context) {
  try {
    return std::stol(s);
  } catch (const std::exception&) {
    throw DataError("unparsable integer in " + context + ": '" + s + "'");
  }
}

void validate_uniform(Dataset& d) {
  int width = -2;
  for (const auto& g : d.graphs) {
    int w = g.features() ? g.features()->cols : -1;
    if (width == -2)
      width = w;
    else if (w != width)
      throw DataError("inconsistent feature width across graphs in dataset '" +
                      d.name + "'");
  }
}

}  // namespace

Dataset parse_tudataset(const fs::path& directory, const std::string& name) {
  const auto file = [&](const std::string& suffix) {
    return directory / (name + suffix);
  };

  const auto edge_lines = read_lines(file("_A.txt"));
  const auto indicator_lines = read_lines(file("_graph_indicator.txt"));
  const auto label_lines = read_lines(file("_graph_labels.txt"));

  const int graph_total = static_cast<int>(label_lines.size());
  const int node_total = static_cast<int>(indicator_lines.size());

  // Node -> graph assignment; nodes of one graph occupy consecutive lines.
  std::vector<int> node_graph(node_total);
  std::vector<int> graph_node_count(graph_total, 0);
  for (int i = 0; i < node_total; ++i) {
    long gid = parse_long(indicator_lines[i], name + "_graph_indicator.txt");
    if (gid < 1 || gid > graph_total)
      throw DataError("indicator out of range: node line " +
                      std::to_string(i + 1) + " points to graph " +
                      std::to_string(gid));
    node_graph[i] = static_cast<int>(gid - 1);
    ++graph_node_count[gid - 1];
  }
  std::vector<int> graph_node_offset(graph_total, 0);
  for (int g = 1; g < graph_total; ++g)
    graph_node_offset[g] = graph_node_offset[g - 1] + graph_node_count[g - 1];

  // Edges, remapped to per-graph local node ids.
  std::vector<std::vector<Edge>> graph_edges(graph_total);
  for (const auto& line : edge_lines) {
    if (line.empty()) continue;
    auto row = parse_csv_row(line, name + "_A.txt");
    if (row.size() != 2) throw DataError("malformed edge row in " + name +
                                         "_A.txt: '" + line + "'");
    long u = static_cast<long>(row[0]), v = static_cast<long>(row[1]);
    if (u < 1 || u > node_total || v < 1 || v > node_total)
      throw DataError("indicator out of range: edge endpoint " +
                      std::to_string(u > node_total || u < 1 ? u : v));
    int gu = node_graph[u - 1], gv = node_graph[v - 1];
    if (gu != gv)
      throw DataError("edge endpoints in different graphs: " + line);
    graph_edges[gu].push_back({static_cast<int>(u - 1) - graph_node_offset[gu],
                               static_cast<int>(v - 1) - graph_node_offset[gu]});
  }

  // Graph labels remapped to contiguous 0-based ids in sorted original order.
  std::vector<long> raw_labels(graph_total);
  std::vector<long> vocab;
  for (int g = 0; g < graph_total; ++g) {
    raw_labels[g] = parse_long(label_lines[g], name + "_graph_labels.txt");
    vocab.push_back(raw_labels[g]);
  }
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  const auto label_id = [&](long raw) {
    return static_cast<int>(std::lower_bound(vocab.begin(), vocab.end(), raw) -
                            vocab.begin());
  };

  // Optional node labels (one-hot) and node attributes (appended).
  std::vector<long> node_labels;
  std::vector<long> node_label_vocab;
  if (fs::exists(file("_node_labels.txt"))) {
    const auto lines = read_lines(file("_node_labels.txt"));
    if (static_cast<int>(lines.size()) != node_total)
      throw DataError("node label count does not match indicator in " + name);
    for (const auto& l : lines)
      node_labels.push_back(parse_long(l, name + "_node_labels.txt"));
    node_label_vocab = node_labels;
    std::sort(node_label_vocab.begin(), node_label_vocab.end());
    node_label_vocab.erase(
        std::unique(node_label_vocab.begin(), node_label_vocab.end()),
        node_label_vocab.end());
  }

  std::vector<std::vector<double>> node_attrs;
  std::size_t attr_width = 0;
  if (fs::exists(file("_node_attributes.txt"))) {
    const auto lines = read_lines(file("_node_attributes.txt"));
    if (static_cast<int>(lines.size()) != node_total)
      throw DataError("attribute count does not match indicator in " + name);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      node_attrs.push_back(parse_csv_row(lines[i], name +
                                         "_node_attributes.txt"));
      if (i == 0)
        attr_width = node_attrs[0].size();
      else if (node_attrs[i].size() != attr_width)
        throw DataError("ragged attribute row at line " + std::to_string(i + 1));
    }
  }

  const int onehot_width = static_cast<int>(node_label_vocab.size());
  const int feature_width = onehot_width + static_cast<int>(attr_width);

  Dataset d;
  d.name = name;
  d.class_count = static_cast<int>(vocab.size());
  d.graphs.reserve(graph_total);
  for (int g = 0; g < graph_total; ++g) {
    Graph graph = Graph::from_edge_list(graph_node_count[g], graph_edges[g]);
    if (feature_width > 0) {
      Matrix features(graph_node_count[g], feature_width);
      for (int local = 0; local < graph_node_count[g]; ++local) {
        const int global = graph_node_offset[g] + local;
        if (onehot_width > 0) {
          int slot = static_cast<int>(
              std::lower_bound(node_label_vocab.begin(), node_label_vocab.end(),
                               node_labels[global]) -
              node_label_vocab.begin());
          features(local, slot) = 1.0;
        }
        for (std::size_t a = 0; a < attr_width; ++a)
          features(local, onehot_width + static_cast<int>(a)) =
              node_attrs[global][a];
      }
      graph = graph.with_features(std::move(features));
    }
    d.graphs.push_back(graph.with_label(label_id(raw_labels[g])));
  }
  return d;
}

Dataset parse_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset file missing: " + path.string());

  Dataset d;
  d.name = path.stem().string();
  std::string line;
  int line_no = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fail = [&](const std::string& detail) -> DataError {
      return DataError("JSONL parse error at line " + std::to_string(line_no) +
                       (detail.empty() ? "" : ": " + detail));
    };
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw fail("not a JSON object");
    if (!obj.contains("n") || !obj["n"].is_number_integer())
      throw fail("missing \"n\"");
    if (!obj.contains("edges") || !obj["edges"].is_array())
      throw fail("missing \"edges\"");
    if (!obj.contains("label") || !obj["label"].is_number_integer())
      throw fail("missing \"label\"");

    const int n = obj["n"].get<int>();
    std::vector<Edge> edges;
    for (const auto& e : obj["edges"]) {
      if (!e.is_array() || e.size() != 2) throw fail("malformed edge");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    Graph g;
    try {
      g = Graph::from_edge_list(n, edges);
    } catch (const DataError& err) {
      throw fail(err.what());
    }
    if (obj.contains("features")) {
      const auto& rows = obj["features"];
      if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw fail("features must have one row per node");
      const int width = rows.empty() ? 0 : static_cast<int>(rows[0].size());
      Matrix f(n, width);
      for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != width)
          throw fail("inconsistent feature row width");
        for (int c = 0; c < width; ++c) f(r, c) = rows[r][c].get<double>();
      }
      g = g.with_features(std::move(f));
    }
    int label = obj["label"].get<int>();
    if (label < 0) throw fail("negative label");
    max_label = std::max(max_label, label);
    d.graphs.push_back(g.with_label(label));
  }
  d.class_count = max_label + 1;
  validate_uniform(d);
  return d;
}

void write_jsonl(const Dataset& dataset, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path.string());
  for (const auto& g : dataset.graphs) {
    json obj;
    obj["n"] = g.node_count();
    json edges = json::array();
    for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
    obj["edges"] = std::move(edges);
    obj["label"] = g.label() ? *g.label() : 0;
    if (g.features()) {
      json rows = json::array();
      for (int r = 0; r < g.features()->rows; ++r) {
        json row = json::array();
        for (double x : g.features()->row(r)) row.push_back(x);
        rows.push_back(std::move(row));
      }
      obj["features"] = std::move(rows);
    }
    out << obj.dump() << '\n';
  }
}

}  // namespace specshift
