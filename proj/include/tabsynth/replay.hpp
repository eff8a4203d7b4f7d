#pragma once

#include <memory>
#include <string>

#include "tabsynth/evaluator.hpp"
#include "tabsynth/exec_bridge.hpp"
#include "tabsynth/transport.hpp"

namespace tabsynth {

// Offline fixture for the mock transport and the canned executor:
//
//   {"responses": [[...], ...]} | {"stream": [...]}    one script for all tasks
//   {"tasks": {"<task id>": {"responses"|"stream": ...}}} one script per task
//   "outputs": {"<cleaned completion>": {"status", "columns"?, "error"?}}
class Replay {
 public:
  static Replay load(const std::string& path);
  static Replay from_json(json doc);

  bool has_outputs() const { return doc_.contains("outputs"); }
  bool per_task() const { return doc_.contains("tasks"); }

  // Fresh mock per task when the fixture is per task; otherwise every task
  // draws from one shared script, in evaluation order.
  TransportFactory transports();
  // Script used for single-table runs (infer): the shared script, or the
  // entry for `task_id` in a per-task fixture.
  std::unique_ptr<Transport> transport_for(const std::string& task_id) const;
  CannedExecutor executor() const;

 private:
  json doc_;
  std::shared_ptr<MockTransport> shared_;
};

}  // namespace tabsynth
