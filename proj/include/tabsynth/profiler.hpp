#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tabsynth/json_io.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

enum class AtomKind {
  title_word,  // [A-Z][a-z]+
  upper_run,   // [A-Z]+
  lower_run,   // [a-z]+
  digit_run,   // [0-9]+
  space_run,   // [\s]+
  literal,     // one code point, kept verbatim
};

struct Atom {
  AtomKind kind;
  std::string text;  // literal only: the UTF-8 bytes of the code point

  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;
};

// A restricted-class regex: a sequence of character-class atoms. The empty
// pattern is reserved for the empty string.
struct SyntacticPattern {
  std::vector<Atom> atoms;

  bool empty() const { return atoms.empty(); }
  std::string to_regex() const;

  bool operator==(const SyntacticPattern&) const = default;
  auto operator<=>(const SyntacticPattern&) const = default;
};

// Greedy left-to-right tokenizer. At each position the first class that
// matches wins, in the order title word, upper run, lower run, digit run,
// space run, literal; each class consumes its longest match.
SyntacticPattern profile_string(std::string_view s);

struct ClusterInfo {
  std::size_t cluster_id = 0;
  SyntacticPattern pattern;
  std::vector<std::size_t> members;  // ascending row indices
  std::string example;               // cell of the first member

  std::size_t weight() const { return members.size(); }
  bool operator==(const ClusterInfo&) const = default;
};

struct ColumnClusters {
  std::string column_name;
  std::vector<ClusterInfo> clusters;  // indexed by cluster_id
  std::vector<std::size_t> row_cluster;  // row -> cluster_id
  bool operator==(const ColumnClusters&) const = default;
};

struct CoveredCluster {
  std::size_t column = 0;
  std::size_t cluster_id = 0;
  std::size_t weight = 0;

  bool operator==(const CoveredCluster&) const = default;
};

// Per-column partition of rows by pattern. Cluster ids within a column are
// ordered by weight descending, then by first occurrence.
struct ClusterMap {
  std::size_t row_count = 0;
  std::vector<ColumnClusters> columns;

  // Clusters touched by `row`, one per column, in column order.
  std::vector<CoveredCluster> row_view(std::size_t row) const;
  std::size_t cluster_count() const;
  bool operator==(const ClusterMap&) const = default;
};

// Throws InvalidArgument("nothing to cluster") for a table without rows.
ClusterMap cluster_table(const Table& table);

// {"columns": [{"name", "clusters": [{"cluster_id", "regex", "weight", "example_cell"}]}]}
json cluster_report(const ClusterMap& map);

}  // namespace tabsynth
