#include "tabsynth/profiler.hpp"

#include <algorithm>
#include <numeric>

namespace tabsynth {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Byte length of the UTF-8 sequence starting at s[i]. Malformed bytes count
// as single-byte literals.
std::size_t code_point_length(std::string_view s, std::size_t i) {
  auto b = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  if ((b & 0xE0) == 0xC0) {
    len = 2;
  } else if ((b & 0xF0) == 0xE0) {
    len = 3;
  } else if ((b & 0xF8) == 0xF0) {
    len = 4;
  }
  if (i + len > s.size()) return 1;
  for (std::size_t k = 1; k < len; ++k) {
    if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 1;
  }
  return len;
}

template <typename Pred>
std::size_t run_end(std::string_view s, std::size_t i, Pred pred) {
  while (i < s.size() && pred(s[i])) ++i;
  return i;
}

void append_escaped(std::string& out, const std::string& literal) {
  static constexpr std::string_view meta = R"(\^$.|?*+()[]{})";
  if (literal.size() == 1 && meta.find(literal[0]) != std::string_view::npos) out.push_back('\\');
  out += literal;
}

}  // namespace

std::string SyntacticPattern::to_regex() const {
  std::string out;
  for (const Atom& a : atoms) {
    switch (a.kind) {
      case AtomKind::title_word: out += "[A-Z][a-z]+"; break;
      case AtomKind::upper_run: out += "[A-Z]+"; break;
      case AtomKind::lower_run: out += "[a-z]+"; break;
      case AtomKind::digit_run: out += "[0-9]+"; break;
      case AtomKind::space_run: out += "[\\s]+"; break;
      case AtomKind::literal: append_escaped(out, a.text); break;
    }
  }
  return out;
}

SyntacticPattern profile_string(std::string_view s) {
  SyntacticPattern p;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (is_upper(c) && i + 1 < s.size() && is_lower(s[i + 1])) {
      p.atoms.push_back({AtomKind::title_word, {}});
      i = run_end(s, i + 1, is_lower);
    } else if (is_upper(c)) {
      p.atoms.push_back({AtomKind::upper_run, {}});
      i = run_end(s, i, is_upper);
    } else if (is_lower(c)) {
      p.atoms.push_back({AtomKind::lower_run, {}});
      i = run_end(s, i, is_lower);
    } else if (is_digit(c)) {
      p.atoms.push_back({AtomKind::digit_run, {}});
      i = run_end(s, i, is_digit);
    } else if (is_space(c)) {
      p.atoms.push_back({AtomKind::space_run, {}});
      i = run_end(s, i, is_space);
    } else {
      std::size_t len = code_point_length(s, i);
      p.atoms.push_back({AtomKind::literal, std::string(s.substr(i, len))});
      i += len;
    }
  }
  return p;
}

std::vector<CoveredCluster> ClusterMap::row_view(std::size_t row) const {
  if (row >= row_count) throw InvalidArgument("row " + std::to_string(row) + " out of range");
  std::vector<CoveredCluster> out;
  out.reserve(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::size_t id = columns[c].row_cluster[row];
    out.push_back({c, id, columns[c].clusters[id].weight()});
  }
  return out;
}

std::size_t ClusterMap::cluster_count() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.clusters.size();
  return n;
}

ClusterMap cluster_table(const Table& table) {
  if (table.row_count() == 0) throw InvalidArgument("nothing to cluster");
  ClusterMap map;
  map.row_count = table.row_count();
  for (const Column& col : table.columns()) {
    // Group in first-occurrence order, then renumber by weight.
    std::map<SyntacticPattern, std::size_t> index;
    std::vector<ClusterInfo> groups;
    for (std::size_t r = 0; r < col.cells.size(); ++r) {
      SyntacticPattern p = profile_string(col.cells[r]);
      auto [it, inserted] = index.try_emplace(std::move(p), groups.size());
      if (inserted) groups.push_back(ClusterInfo{0, it->first, {}, col.cells[r]});
      groups[it->second].members.push_back(r);
    }
    std::stable_sort(groups.begin(), groups.end(), [](const ClusterInfo& a, const ClusterInfo& b) {
      return a.weight() > b.weight();
    });
    ColumnClusters cc{col.name, std::move(groups), std::vector<std::size_t>(table.row_count())};
    for (std::size_t id = 0; id < cc.clusters.size(); ++id) {
      cc.clusters[id].cluster_id = id;
      for (std::size_t r : cc.clusters[id].members) cc.row_cluster[r] = id;
    }
    map.columns.push_back(std::move(cc));
  }
  return map;
}

json cluster_report(const ClusterMap& map) {
  json doc = json::object();
  json cols = json::array();
  for (const ColumnClusters& cc : map.columns) {
    json clusters = json::array();
    for (const ClusterInfo& info : cc.clusters) {
      clusters.push_back(json{{"cluster_id", info.cluster_id},
                              {"regex", info.pattern.to_regex()},
                              {"weight", info.weight()},
                              {"example_cell", info.example}});
    }
    cols.push_back(json{{"name", cc.column_name}, {"clusters", std::move(clusters)}});
  }
  doc["columns"] = std::move(cols);
  return doc;
}

}  // namespace tabsynth
