#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabsynth/exec_bridge.hpp"
#include "tabsynth/postprocess.hpp"
#include "tabsynth/profiler.hpp"
#include "tabsynth/selector.hpp"
#include "tabsynth/transport.hpp"

namespace tabsynth {

// Cluster maps keyed by table content, so a table shared by several runs is
// profiled once. Thread-safe.
class ClusterCache {
 public:
  std::shared_ptr<const ClusterMap> get(const Table& table);
  std::size_t size() const;

 private:
  struct Entry {
    Table table;
    std::shared_ptr<const ClusterMap> map;
  };
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> entries_;
};

std::uint64_t table_content_hash(const Table& table);

struct CompletionLog {
  std::string raw;
  std::string cleaned;
  std::string stage_reached;  // transport | rewrite | exec | validate | accept
  std::string status;         // refused | no-rewrite | <exec status> | invalid-shape |
                              // duplicate | surplus | accepted
  std::string rewrite_form;
  std::size_t rows_executed = 0;  // row count of the table the program defined
  std::optional<std::string> error;
};

struct InferenceResult {
  std::vector<std::string> completions;  // C: unique cleaned completions
  std::vector<std::string> programs;     // executable program per completion
  std::vector<Table> outputs;            // O
  std::size_t calls_used = 0;            // completions requested
  std::size_t requests = 0;              // transport round trips
  std::vector<std::size_t> batch_sizes;
  std::vector<CompletionLog> log;
  RowSelection prompt_rows;
  std::size_t prompt_chars = 0;
  bool aborted = false;
  std::optional<std::string> abort_reason;
};

struct InferenceOptions {
  SelectionConfig selection;
  InferenceConfig config;
  int timeout_ms = 5000;
  ClusterCache* cluster_cache = nullptr;
};

// Prompt for the selected rows of `table`, as sent to the transport.
Prompt prompt_for(std::string_view query, const Table& table, const SelectionConfig& selection,
                  ClusterCache* cache = nullptr, RowSelection* chosen = nullptr);

// Samples batches until k unique valid completions are collected or the
// completion budget is spent. Every completion runs against the full table.
InferenceResult infer(std::string_view query, const Table& table, const InferenceOptions& options,
                      Transport& transport, Executor& executor);

}  // namespace tabsynth
