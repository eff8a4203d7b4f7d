#include "tabsynth/exec_bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <thread>

namespace tabsynth {

std::string_view to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::ok: return "ok";
    case ExecStatus::runtime_error: return "runtime-error";
    case ExecStatus::timeout: return "timeout";
    case ExecStatus::protocol_error: return "protocol-error";
  }
  return "protocol-error";
}

ExecStatus parse_exec_status(std::string_view s) {
  if (s == "ok") return ExecStatus::ok;
  if (s == "runtime-error") return ExecStatus::runtime_error;
  if (s == "timeout") return ExecStatus::timeout;
  if (s == "protocol-error") return ExecStatus::protocol_error;
  throw ParseError("unknown exec status '" + std::string(s) + "'");
}

std::string encode_request(const ExecRequest& request) {
  json doc = json::object();
  doc["program"] = request.program;
  doc["output_var"] = request.output_var;
  doc["timeout_ms"] = request.timeout_ms;
  return doc.dump();
}

namespace {

ExecOutput protocol_failure(std::string message, std::string_view raw) {
  ExecOutput out;
  out.status = ExecStatus::protocol_error;
  out.error_message = std::move(message);
  out.raw_reply = std::string(raw);
  return out;
}

}  // namespace

ExecOutput decode_reply(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error&) {
    return protocol_failure("runner reply is not JSON", line);
  }
  if (!doc.is_object() || !doc.contains("status") || !doc["status"].is_string()) {
    return protocol_failure("runner reply lacks a status", line);
  }
  ExecOutput out;
  out.raw_reply = std::string(line);
  try {
    out.status = parse_exec_status(doc["status"].get<std::string>());
  } catch (const ParseError& e) {
    return protocol_failure(e.what(), line);
  }
  if (doc.contains("error") && doc["error"].is_string()) {
    out.error_message = doc["error"].get<std::string>();
  }
  if (out.status == ExecStatus::ok) {
    if (!doc.contains("columns")) return protocol_failure("ok reply without columns", line);
    try {
      out.value = table_from_columns_json(doc["columns"]);
    } catch (const Error& e) {
      return protocol_failure(std::string("bad columns in reply: ") + e.what(), line);
    }
  }
  return out;
}

std::string encode_reply(const ExecOutput& output) {
  json doc = json::object();
  doc["status"] = std::string(to_string(output.status));
  if (output.value) doc["columns"] = columns_to_json(*output.value);
  if (output.error_message) doc["error"] = *output.error_message;
  return doc.dump();
}

// ---------------------------------------------------------------- subprocess

struct SubprocessExecutor::Runner {
  pid_t pid = -1;
  int in_fd = -1;   // our end of the runner's stdin
  int out_fd = -1;  // our end of the runner's stdout
  std::filesystem::path workdir;
  std::string spawn_error;  // non-empty if the runner could not be started

  ~Runner() {
    if (in_fd >= 0) ::close(in_fd);
    if (out_fd >= 0) ::close(out_fd);
    if (pid > 0) {
      ::kill(-pid, SIGKILL);
      int status = 0;
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
    }
    if (!workdir.empty()) {
      std::error_code ec;
      std::filesystem::remove_all(workdir, ec);
    }
  }
};

namespace {

std::unique_ptr<SubprocessExecutor::Runner> spawn_runner(const std::vector<std::string>& command) {
  auto runner = std::make_unique<SubprocessExecutor::Runner>();
  if (command.empty()) {
    runner->spawn_error = "no runner command configured";
    return runner;
  }
  std::string tmpl = (std::filesystem::temp_directory_path() / "tabsynth-run-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    runner->spawn_error = std::string("mkdtemp failed: ") + std::strerror(errno);
    return runner;
  }
  runner->workdir = tmpl;

  int in_pair[2], out_pair[2], err_pipe[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) {
    runner->spawn_error = std::string("socketpair failed: ") + std::strerror(errno);
    return runner;
  }
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) {
    ::close(in_pair[0]);
    ::close(in_pair[1]);
    runner->spawn_error = std::string("socketpair failed: ") + std::strerror(errno);
    return runner;
  }
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    for (int fd : {in_pair[0], in_pair[1], out_pair[0], out_pair[1]}) ::close(fd);
    runner->spawn_error = std::string("pipe failed: ") + std::strerror(errno);
    return runner;
  }

  std::vector<char*> argv;
  for (const std::string& a : command) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  std::string home = "HOME=" + runner->workdir.string();
  std::string path = "PATH=/usr/local/bin:/usr/bin:/bin";
  std::string lang = "LANG=C.UTF-8";
  std::vector<char*> envp{home.data(), path.data(), lang.data(), nullptr};
  std::string workdir = runner->workdir.string();

  pid_t pid = ::fork();
  if (pid < 0) {
    runner->spawn_error = std::string("fork failed: ") + std::strerror(errno);
    for (int fd : {in_pair[0], in_pair[1], out_pair[0], out_pair[1], err_pipe[0], err_pipe[1]}) {
      ::close(fd);
    }
    return runner;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pair[1], STDIN_FILENO);
    ::dup2(out_pair[1], STDOUT_FILENO);
    int err = 0;
    if (::chdir(workdir.c_str()) != 0) {
      err = errno;
    } else {
      ::execve(argv[0], argv.data(), envp.data());
      if (errno == ENOENT && std::strchr(argv[0], '/') == nullptr) {
        ::execvpe(argv[0], argv.data(), envp.data());
      }
      err = errno;
    }
    ssize_t ignored = ::write(err_pipe[1], &err, sizeof err);
    (void)ignored;
    ::_exit(127);
  }

  ::setpgid(pid, pid);
  ::close(in_pair[1]);
  ::close(out_pair[1]);
  ::close(err_pipe[1]);
  runner->pid = pid;
  runner->in_fd = in_pair[0];
  runner->out_fd = out_pair[0];

  int child_errno = 0;
  ssize_t got;
  do {
    got = ::read(err_pipe[0], &child_errno, sizeof child_errno);
  } while (got < 0 && errno == EINTR);
  ::close(err_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof child_errno)) {
    runner->spawn_error = "runner '" + command.front() + "' unavailable: " +
                          std::strerror(child_errno);
  }
  return runner;
}

}  // namespace

SubprocessExecutor::SubprocessExecutor(SubprocessOptions options) : options_(std::move(options)) {
  for (std::size_t i = 0; i < options_.warm_pool; ++i) pool_.push_back(spawn_runner(options_.command));
}

SubprocessExecutor::~SubprocessExecutor() = default;

std::unique_ptr<SubprocessExecutor::Runner> SubprocessExecutor::acquire() {
  std::unique_ptr<Runner> runner;
  {
    std::lock_guard lock(mu_);
    if (!pool_.empty()) {
      runner = std::move(pool_.front());
      pool_.pop_front();
    }
  }
  if (!runner) runner = spawn_runner(options_.command);
  if (options_.warm_pool > 0) {
    auto replacement = spawn_runner(options_.command);
    std::lock_guard lock(mu_);
    pool_.push_back(std::move(replacement));
  }
  return runner;
}

ExecOutput SubprocessExecutor::execute(const ExecRequest& request) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto finish = [&](ExecOutput out) {
    out.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count();
    return out;
  };
  if (request.program.empty()) throw InvalidArgument("program must not be empty");
  if (request.timeout_ms < 1) throw InvalidArgument("timeout_ms must be at least 1");

  std::unique_ptr<Runner> runner = acquire();
  if (!runner->spawn_error.empty()) return finish(protocol_failure(runner->spawn_error, ""));

  const auto deadline = start + std::chrono::milliseconds(request.timeout_ms + options_.grace_ms);
  std::string payload = encode_request(request) + "\n";
  std::size_t sent = 0;
  while (sent < payload.size()) {
    ssize_t n = ::send(runner->in_fd, payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return finish(protocol_failure(std::string("runner closed its input: ") + std::strerror(errno), ""));
    }
    sent += static_cast<std::size_t>(n);
  }
  ::shutdown(runner->in_fd, SHUT_WR);

  std::string received;
  bool eof = false;
  while (received.find('\n') == std::string::npos && !eof) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    if (left.count() <= 0) {
      ExecOutput out;
      out.status = ExecStatus::timeout;
      out.error_message = "runner exceeded " + std::to_string(request.timeout_ms) + " ms";
      out.raw_reply = received;
      return finish(std::move(out));  // Runner's destructor kills the group.
    }
    pollfd pfd{runner->out_fd, POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      return finish(protocol_failure(std::string("poll failed: ") + std::strerror(errno), received));
    }
    if (ready == 0) continue;
    char buf[4096];
    ssize_t n = ::read(runner->out_fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      return finish(protocol_failure(std::string("read failed: ") + std::strerror(errno), received));
    }
    if (n == 0) {
      eof = true;
    } else {
      received.append(buf, static_cast<std::size_t>(n));
    }
  }

  auto nl = received.find('\n');
  std::string line = nl == std::string::npos ? received : received.substr(0, nl);
  if (line.empty()) {
    return finish(protocol_failure("runner exited without a reply", received));
  }
  return finish(decode_reply(line));
}

// ---------------------------------------------------------------- canned

CannedExecutor::CannedExecutor(std::map<std::string, ExecOutput> outputs)
    : outputs_(std::move(outputs)) {}

CannedExecutor::CannedExecutor(CannedExecutor&& other) noexcept
    : outputs_(std::move(other.outputs_)), seen_(std::move(other.seen_)) {}

CannedExecutor CannedExecutor::from_json(const json& outputs) {
  if (!outputs.is_object()) throw ParseError("canned outputs must be a JSON object");
  std::map<std::string, ExecOutput> table;
  for (const auto& [key, value] : outputs.items()) {
    ExecOutput out = decode_reply(value.dump());
    if (out.status == ExecStatus::protocol_error && !value.contains("status")) {
      throw ParseError("canned output for '" + key + "' has no status");
    }
    out.raw_reply.clear();
    table.emplace(key, std::move(out));
  }
  return CannedExecutor(std::move(table));
}

ExecOutput CannedExecutor::execute(const ExecRequest& request) {
  {
    std::lock_guard lock(mu_);
    seen_.push_back(request);
  }
  auto it = outputs_.find(request.completion);
  if (it == outputs_.end()) {
    return protocol_failure("no canned output for completion", "");
  }
  return it->second;
}

std::vector<ExecRequest> CannedExecutor::seen() const {
  std::lock_guard lock(mu_);
  return seen_;
}

}  // namespace tabsynth
