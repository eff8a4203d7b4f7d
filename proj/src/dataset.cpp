#include "tabsynth/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tabsynth {

std::string_view to_string(TaskClass c) {
  switch (c) {
    case TaskClass::ind: return "ind";
    case TaskClass::dep: return "dep";
    case TaskClass::ext: return "ext";
  }
  return "ind";
}

TaskClass parse_task_class(std::string_view s) {
  if (s == "ind") return TaskClass::ind;
  if (s == "dep") return TaskClass::dep;
  if (s == "ext") return TaskClass::ext;
  throw ParseError("unknown task class '" + std::string(s) + "'");
}

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("task is missing \"") + key + "\"");
  return doc.at(key);
}

std::string require_string(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_string()) throw ParseError(std::string("task field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::set<std::string> lowered_set(const json& arr, const char* key) {
  if (!arr.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array of strings");
  std::set<std::string> out;
  for (const json& v : arr) {
    if (!v.is_string()) throw ParseError(std::string("\"") + key + "\" must be an array of strings");
    std::string s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.insert(std::move(s));
  }
  return out;
}

MatchOptions match_options_from_json(const json& doc) {
  MatchOptions opts;
  if (!doc.is_object()) throw ParseError("\"match_options\" must be an object");
  if (doc.contains("relative_error")) {
    if (!doc["relative_error"].is_number()) throw ParseError("relative_error must be a number");
    opts.relative_error = doc["relative_error"].get<double>();
  }
  if (doc.contains("case_sensitive")) {
    if (!doc["case_sensitive"].is_boolean()) throw ParseError("case_sensitive must be a boolean");
    opts.case_sensitive = doc["case_sensitive"].get<bool>();
  }
  if (doc.contains("true_strings")) opts.true_strings = lowered_set(doc["true_strings"], "true_strings");
  if (doc.contains("false_strings")) {
    opts.false_strings = lowered_set(doc["false_strings"], "false_strings");
  }
  try {
    opts.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return opts;
}

}  // namespace

Task task_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("task must be a JSON object");
  Task t;
  t.id = require_string(doc, "id");
  if (t.id.empty()) throw ParseError("task id must not be empty");
  t.query = require_string(doc, "query");
  if (t.query.empty()) throw ParseError("task query must not be empty");
  t.task_class = parse_task_class(require_string(doc, "class"));
  t.input = table_from_json(require(doc, "input"));
  t.expected = table_from_json(require(doc, "expected"));
  if (t.expected.row_count() != t.input.row_count()) {
    throw ParseError("expected output has " + std::to_string(t.expected.row_count()) +
                     " rows but input has " + std::to_string(t.input.row_count()));
  }
  if (doc.contains("match_options")) t.match_options = match_options_from_json(doc["match_options"]);
  if (doc.contains("reference_solution")) {
    if (!doc["reference_solution"].is_string()) {
      throw ParseError("reference_solution must be a string");
    }
    t.reference_solution = doc["reference_solution"].get<std::string>();
  }
  if (doc.contains("metadata")) t.metadata = doc["metadata"];
  return t;
}

json task_to_json(const Task& task) {
  json doc = json::object();
  doc["id"] = task.id;
  doc["query"] = task.query;
  doc["class"] = std::string(to_string(task.task_class));
  doc["input"] = table_to_json(task.input);
  doc["expected"] = table_to_json(task.expected);
  json mo = json::object();
  mo["relative_error"] = task.match_options.relative_error;
  mo["case_sensitive"] = task.match_options.case_sensitive;
  mo["true_strings"] = task.match_options.true_strings;
  mo["false_strings"] = task.match_options.false_strings;
  doc["match_options"] = std::move(mo);
  if (task.reference_solution) doc["reference_solution"] = *task.reference_solution;
  if (!task.metadata.empty()) doc["metadata"] = task.metadata;
  return doc;
}

Task load_task(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open task file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    check_utf8(buf.str());
    Task t = task_from_json(json::parse(buf.str()));
    t.source_path = path;
    return t;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": malformed JSON: " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<Task> load_suite(const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw IoError("'" + directory + "' is not a directory");
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != ".json" || p.filename().string().front() == '_') continue;
    paths.push_back(p.string());
  }
  std::sort(paths.begin(), paths.end());

  std::vector<Task> tasks;
  for (const std::string& p : paths) tasks.push_back(load_task(p));
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < tasks.size(); ++i) {
    if (tasks[i].id == tasks[i - 1].id) {
      throw ParseError("duplicate task id '" + tasks[i].id + "' in '" + tasks[i - 1].source_path +
                       "' and '" + tasks[i].source_path + "'");
    }
  }
  return tasks;
}

}  // namespace tabsynth
