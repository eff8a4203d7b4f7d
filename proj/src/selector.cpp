#include "tabsynth/selector.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace tabsynth {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::first: return "first";
    case Strategy::random: return "random";
    case Strategy::representative: return "representative";
    case Strategy::all: return "all";
  }
  return "none";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "none") return Strategy::none;
  if (name == "first") return Strategy::first;
  if (name == "random") return Strategy::random;
  if (name == "representative") return Strategy::representative;
  if (name == "all") return Strategy::all;
  throw InvalidArgument("unknown selection strategy '" + std::string(name) + "'");
}

RowSelection select_representative(const Table& table, const ClusterMap& map, std::size_t n) {
  if (table.row_count() == 0) throw InvalidArgument("cannot select from an empty table");
  if (n < 1 || n > table.row_count()) {
    throw InvalidArgument("row budget " + std::to_string(n) + " outside [1, " +
                          std::to_string(table.row_count()) + "]");
  }
  if (map.row_count != table.row_count() || map.columns.size() != table.column_count()) {
    throw InvalidArgument("cluster map does not describe this table");
  }

  const std::size_t rows = table.row_count();
  const std::size_t total_clusters = map.cluster_count();

  // covered[c][id]
  std::vector<std::vector<bool>> covered;
  for (const auto& cc : map.columns) covered.emplace_back(cc.clusters.size(), false);
  std::size_t covered_count = 0;
  std::vector<bool> chosen(rows, false);

  RowSelection out;
  out.reserve(n);
  while (out.size() < n) {
    std::size_t best = rows;
    std::size_t best_gain = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (chosen[r]) continue;
      std::size_t gain = 0;
      for (std::size_t c = 0; c < map.columns.size(); ++c) {
        std::size_t id = map.columns[c].row_cluster[r];
        if (!covered[c][id]) gain += map.columns[c].clusters[id].weight();
      }
      if (best == rows || gain > best_gain) {
        best = r;
        best_gain = gain;
      }
    }
    chosen[best] = true;
    out.push_back(best);
    for (std::size_t c = 0; c < map.columns.size(); ++c) {
      std::size_t id = map.columns[c].row_cluster[best];
      if (!covered[c][id]) {
        covered[c][id] = true;
        ++covered_count;
      }
    }
    if (covered_count == total_clusters) {
      for (auto& col : covered) std::fill(col.begin(), col.end(), false);
      covered_count = 0;
    }
  }
  return out;
}

namespace {

// Uniform draw in [0, bound) by rejection on raw 64-bit output, so results
// do not depend on the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

RowSelection sample_without_replacement(std::size_t population, std::size_t n,
                                        std::uint64_t seed) {
  if (n > population) {
    throw InvalidArgument("cannot draw " + std::to_string(n) + " rows from " +
                          std::to_string(population));
  }
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  // Partial Fisher-Yates: the first n slots hold the sample.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(gen, population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

RowSelection select(const Table& table, const ClusterMap* map, const SelectionConfig& config) {
  const std::size_t rows = table.row_count();
  const std::size_t n = config.row_budget;
  bool bounded_strategy = config.strategy != Strategy::none && config.strategy != Strategy::all;
  if (bounded_strategy && n > rows) {
    throw InvalidArgument("row budget " + std::to_string(n) + " exceeds row count " +
                          std::to_string(rows));
  }
  if ((map != nullptr) != (config.strategy == Strategy::representative)) {
    throw InvalidArgument("a cluster map is required for, and only for, representative selection");
  }
  switch (config.strategy) {
    case Strategy::none:
      return {};
    case Strategy::first: {
      RowSelection out(n);
      std::iota(out.begin(), out.end(), std::size_t{0});
      return out;
    }
    case Strategy::random:
      if (!config.rng_seed) throw InvalidArgument("random selection requires a seed");
      return sample_without_replacement(rows, n, *config.rng_seed);
    case Strategy::representative:
      return select_representative(table, *map, n);
    case Strategy::all: {
      RowSelection out(rows);
      std::iota(out.begin(), out.end(), std::size_t{0});
      return out;
    }
  }
  return {};
}

}  // namespace tabsynth
