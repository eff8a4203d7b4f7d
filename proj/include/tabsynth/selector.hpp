#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tabsynth/profiler.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

// Data regimes: none = no-data, first = first-n rows, random = random-n,
// representative = represent-n, all = full-data.
enum class Strategy { none, first, random, representative, all };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct SelectionConfig {
  Strategy strategy = Strategy::none;
  std::size_t row_budget = 0;
  std::optional<std::uint64_t> rng_seed;  // required for Strategy::random
};

// Greedy weighted maximal coverage. Each step takes the unselected row whose
// not-yet-covered clusters have the largest total weight (lowest index on
// ties). Once every cluster is covered the covered set is cleared and the
// loop continues until n rows are chosen.
RowSelection select_representative(const Table& table, const ClusterMap& map, std::size_t n);

// `map` must be present exactly when the strategy is representative.
RowSelection select(const Table& table, const ClusterMap* map, const SelectionConfig& config);

// n distinct indices in [0, population), drawn without replacement. The
// sequence is a pure function of the seed on every platform.
RowSelection sample_without_replacement(std::size_t population, std::size_t n,
                                        std::uint64_t seed);

}  // namespace tabsynth
