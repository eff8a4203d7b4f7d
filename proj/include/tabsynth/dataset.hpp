#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabsynth/json_io.hpp"
#include "tabsynth/table.hpp"
#include "tabsynth/validator.hpp"

namespace tabsynth {

// Task taxonomy: data-independent, data-dependent, external-dependent.
enum class TaskClass { ind, dep, ext };

std::string_view to_string(TaskClass c);
TaskClass parse_task_class(std::string_view s);

struct Task {
  std::string id;
  std::string query;
  TaskClass task_class = TaskClass::ind;
  Table input;
  Table expected;  // only the extra output columns
  MatchOptions match_options;
  std::optional<std::string> reference_solution;
  json metadata = json::object();  // carried, never interpreted
  std::string source_path;
};

// Throws ParseError (with the file path in the message) on schema or
// invariant violations.
Task task_from_json(const json& doc);
json task_to_json(const Task& task);

Task load_task(const std::string& path);

// Every *.json file directly inside `directory`, sorted by task id. Files
// whose name starts with '_' are skipped (replay fixtures live beside tasks).
std::vector<Task> load_suite(const std::string& directory);

}  // namespace tabsynth
