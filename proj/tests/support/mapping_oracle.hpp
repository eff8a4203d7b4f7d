#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tabsynth/validator.hpp"

// Tries every injective assignment of expected columns to actual columns.
inline bool exhaustive_match(const tabsynth::Table& expected, const tabsynth::Table& actual,
                             const tabsynth::MatchOptions& opts) {
  const std::size_t ne = expected.column_count(), na = actual.column_count();
  std::vector<int> pick(ne, -1);
  std::vector<bool> used(na, false);
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == ne) {
      for (std::size_t c = 0; c < ne; ++c) {
        for (std::size_t r = 0; r < expected.row_count(); ++r) {
          if (!tabsynth::cells_match(expected.cell(c, r), actual.cell(pick[c], r), opts)) return false;
        }
      }
      return true;
    }
    for (std::size_t j = 0; j < na; ++j) {
      if (used[j]) continue;
      used[j] = true;
      pick[i] = static_cast<int>(j);
      if (go(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return go(0);
}

// Small tables over a vocabulary with many near-equal cells, so several
// columns compete for the same partners.
inline std::pair<tabsynth::Table, tabsynth::Table> random_match_case(std::mt19937& gen) {
  static const std::vector<std::string> vocab = {"1", "1.0", "1.005", "2", "TRUE", "yes", "0",
                                                 "false", "abc", "ABC", "x", "5", "5.05"};
  std::uniform_int_distribution<int> ecols(1, 4), acols(1, 5), rows(1, 3);
  int ne = ecols(gen), na = acols(gen), nr = rows(gen);
  auto cell = [&] { return vocab[gen() % vocab.size()]; };
  std::vector<tabsynth::Column> exp, act;
  for (int c = 0; c < ne; ++c) {
    tabsynth::Column col{"e" + std::to_string(c), {}};
    for (int r = 0; r < nr; ++r) col.cells.push_back(cell());
    exp.push_back(std::move(col));
  }
  for (int c = 0; c < na; ++c) {
    tabsynth::Column col{"a" + std::to_string(c), {}};
    // Often copy an expected column so matches exist.
    if (gen() % 2 && ne > 0) {
      col.cells = exp[gen() % ne].cells;
      if (gen() % 3 == 0) col.cells[gen() % nr] = cell();
    } else {
      for (int r = 0; r < nr; ++r) col.cells.push_back(cell());
    }
    act.push_back(std::move(col));
  }
  return {tabsynth::Table(exp), tabsynth::Table(act)};
}
