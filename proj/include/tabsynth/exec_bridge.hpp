#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tabsynth/json_io.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

enum class ExecStatus { ok, runtime_error, timeout, protocol_error };

std::string_view to_string(ExecStatus s);
ExecStatus parse_exec_status(std::string_view s);

struct ExecOutput {
  ExecStatus status = ExecStatus::protocol_error;
  std::optional<Table> value;  // present iff status == ok
  std::optional<std::string> error_message;
  std::int64_t duration_ms = 0;
  std::string raw_reply;  // runner payload as received, kept for logs
};

struct ExecRequest {
  std::string program;
  std::string output_var;
  int timeout_ms = 5000;
  // Cleaned completion the program was built from. Not sent on the wire.
  std::string completion;
};

// {"program", "output_var", "timeout_ms"} as one line, no trailing newline.
std::string encode_request(const ExecRequest& request);
// Parses one reply line. Malformed payloads become protocol_error with the
// raw text retained.
ExecOutput decode_reply(std::string_view line);
std::string encode_reply(const ExecOutput& output);

class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecOutput execute(const ExecRequest& request) = 0;
};

struct SubprocessOptions {
  std::vector<std::string> command;  // argv of the runner
  int grace_ms = 500;                 // added to timeout_ms before SIGKILL
  std::size_t warm_pool = 0;          // runners started ahead of demand
};

// Runs the sandbox runner as a child process per request, in its own process
// group, inside a fresh empty working directory and with a minimal
// environment. Speaks one request line on stdin, one reply line on stdout.
class SubprocessExecutor : public Executor {
 public:
  explicit SubprocessExecutor(SubprocessOptions options);
  ~SubprocessExecutor() override;
  SubprocessExecutor(const SubprocessExecutor&) = delete;
  SubprocessExecutor& operator=(const SubprocessExecutor&) = delete;

  ExecOutput execute(const ExecRequest& request) override;

  struct Runner;

 private:
  std::unique_ptr<Runner> acquire();

  SubprocessOptions options_;
  std::mutex mu_;
  std::deque<std::unique_ptr<Runner>> pool_;
};

// Canned outputs keyed by cleaned completion text; anything unknown yields a
// protocol_error. Used for offline replays.
class CannedExecutor : public Executor {
 public:
  explicit CannedExecutor(std::map<std::string, ExecOutput> outputs);
  CannedExecutor(CannedExecutor&& other) noexcept;
  // {"<cleaned completion>": {"status", "columns"?, "error"?}, ...}
  static CannedExecutor from_json(const json& outputs);

  ExecOutput execute(const ExecRequest& request) override;
  std::vector<ExecRequest> seen() const;

 private:
  std::map<std::string, ExecOutput> outputs_;
  mutable std::mutex mu_;
  std::vector<ExecRequest> seen_;
};

}  // namespace tabsynth
