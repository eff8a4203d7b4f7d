#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tabsynth/dataset.hpp"
#include "tabsynth/inference.hpp"

namespace tabsynth {

// Unbiased estimate 1 - C(m-s, k) / C(m, k) as a running product, stable
// for large m. Requires 1 <= k <= m and s <= m.
double pass_at_k(std::size_t m, std::size_t s, std::size_t k);

// pass@k when fewer than k valid completions were obtained: 1 if any of the
// m' < k completions is correct, else 0.
double pass_at_k_shortfall(std::size_t m, std::size_t s, std::size_t k);

struct TaskEvalStats {
  std::string task_id;
  TaskClass task_class = TaskClass::ind;
  std::string strategy;
  std::size_t m = 0;         // valid completions obtained
  std::size_t s = 0;         // of which correct
  std::size_t m_target = 0;  // m_factor * max(k)
  bool shortfall = false;
  std::size_t calls_used = 0;
  std::map<std::size_t, double> pass_at;
  std::optional<std::string> error;
};

struct ClassSummary {
  std::string label;  // all | ind | dep | ext
  std::size_t tasks = 0;
  std::map<std::size_t, double> pass_at;
};

struct EvalReport {
  std::vector<TaskEvalStats> tasks;  // sorted by task id
  std::vector<ClassSummary> summary;
  std::vector<std::size_t> k_values;
  json metadata = json::object();

  json to_json() const;
  std::string to_text() const;
};

struct EvalOptions {
  SelectionConfig selection;
  std::vector<std::size_t> k_values{1};
  std::size_t m_factor = 20;
  std::size_t budget_factor = 8;
  InferenceConfig base;  // temperature, stops, limits; k and budget are derived
  int timeout_ms = 5000;
  std::size_t jobs = 1;  // tasks evaluated concurrently
};

using TransportFactory = std::function<std::unique_ptr<Transport>(const Task&)>;

EvalReport evaluate(const std::vector<Task>& tasks, const EvalOptions& options,
                    const TransportFactory& make_transport, Executor& executor,
                    const std::string& model_name);

}  // namespace tabsynth
