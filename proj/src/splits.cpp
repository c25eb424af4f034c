#include "specshift/splits.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

#include "specshift/errors.hpp"
#include "specshift/rng.hpp"

namespace specshift {

std::map<int, int> SplitBundle::class_counts(const std::vector<int>& indices,
                                             const Dataset& d) {
  std::map<int, int> counts;
  for (int i : indices) ++counts[d.graphs[i].label().value_or(0)];
  return counts;
}

namespace {

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.bounded(i)]);
}

int label_of(const Dataset& d, int index) {
  const auto& l = d.graphs[index].label();
  if (!l) throw DataError("graph " + std::to_string(index) + " has no label");
  return *l;
}

}  // namespace

SplitBundle make_size_splits(const Dataset& d, SplitRatios ratios,
                             std::uint64_t seed) {
  const int n = d.size();
  if (n == 0) throw DataError("dataset is empty");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return d.graphs[a].node_count() < d.graphs[b].node_count();
  });

  // Smallest half; for odd sizes the boundary graph goes to the pool.
  const int pool_size = (n + 1) / 2;
  std::vector<std::vector<int>> pool_by_class(d.class_count);
  std::set<int> pool_members;
  for (int i = 0; i < pool_size; ++i) {
    const int idx = order[i];
    const int label = label_of(d, idx);
    if (label < 0 || label >= d.class_count)
      throw DataError("label out of range on graph " + std::to_string(idx));
    pool_by_class[label].push_back(idx);
    pool_members.insert(idx);
  }

  SplitBundle out;
  Rng rng(seed);
  for (int c = 0; c < d.class_count; ++c) {
    auto& members = pool_by_class[c];
    if (members.empty())
      throw DataError("class " + std::to_string(c) + " cannot satisfy split");
    shuffle(members, rng);

    const int n_c = static_cast<int>(members.size());
    const int n_train = static_cast<int>(ratios.train * n_c);
    const int n_small = static_cast<int>(ratios.small_test * n_c);
    const int n_val = n_c - n_train - n_small;
    if (n_val < 0)
      throw DataError("class " + std::to_string(c) + " cannot satisfy split");

    out.train.insert(out.train.end(), members.begin(),
                     members.begin() + n_train);
    out.val.insert(out.val.end(), members.begin() + n_train,
                   members.begin() + n_train + n_val);
    out.small_test.insert(out.small_test.end(),
                          members.begin() + n_train + n_val, members.end());

    // Per-class largest graphs outside the pool, as many as small_test got.
    int wanted = n_small;
    for (int i = n - 1; i >= 0 && wanted > 0; --i) {
      const int idx = order[i];
      if (pool_members.count(idx) || label_of(d, idx) != c) continue;
      out.large_test.push_back(idx);
      --wanted;
    }
    if (wanted > 0)
      throw DataError("class " + std::to_string(c) + " cannot satisfy split");
  }
  return out;
}

std::vector<int> upsample(const std::vector<int>& train_indices,
                          const std::vector<int>& labels,
                          const UpsampleSpec& spec, std::uint64_t seed) {
  std::vector<int> out = train_indices;
  Rng rng(seed);
  for (const auto& [cls, entry] : spec) {
    if (entry.fraction <= 0.0 || entry.fraction > 1.0)
      throw DataError("upsample fraction must lie in (0, 1]");
    if (entry.ratio < 1) throw DataError("upsample ratio must be >= 1");

    std::vector<int> members;
    for (int idx : train_indices)
      if (labels[idx] == cls) members.push_back(idx);
    if (members.empty())
      throw DataError("upsample class " + std::to_string(cls) +
                      " absent from train split");

    const int take =
        static_cast<int>(entry.fraction * static_cast<double>(members.size()));
    // Partial Fisher-Yates: the first `take` entries are a uniform sample.
    for (int i = 0; i < take; ++i) {
      const std::size_t j = i + rng.bounded(members.size() - i);
      std::swap(members[i], members[j]);
    }
    for (int i = 0; i < take; ++i)
      for (int r = 1; r < entry.ratio; ++r) out.push_back(members[i]);
  }
  return out;
}

void write_splits(const SplitBundle& splits,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path.string());
  const auto section = [&](const char* name, const std::vector<int>& v) {
    out << '[' << name << "]\n";
    for (int i : v) out << i << '\n';
  };
  section("train", splits.train);
  section("val", splits.val);
  section("small_test", splits.small_test);
  section("large_test", splits.large_test);
}

SplitBundle read_splits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset file missing: " + path.string());
  SplitBundle out;
  std::vector<int>* current = nullptr;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "[train]")
      current = &out.train;
    else if (line == "[val]")
      current = &out.val;
    else if (line == "[small_test]")
      current = &out.small_test;
    else if (line == "[large_test]")
      current = &out.large_test;
    else if (line[0] == '[')
      throw DataError("unknown split section at line " +
                      std::to_string(line_no) + ": " + line);
    else {
      if (!current)
        throw DataError("split index before any section at line " +
                        std::to_string(line_no));
      try {
        current->push_back(std::stoi(line));
      } catch (const std::exception&) {
        throw DataError("unparsable split index at line " +
                        std::to_string(line_no) + ": " + line);
      }
    }
  }
  return out;
}

}  // namespace specshift
