#include "tabsynth/replay.hpp"

#include <fstream>
#include <sstream>

namespace tabsynth {

namespace {

// Forwards to a mock owned elsewhere so several tasks can consume one script.
class SharedTransport : public Transport {
 public:
  explicit SharedTransport(std::shared_ptr<MockTransport> inner) : inner_(std::move(inner)) {}
  std::string model_name() const override { return inner_->model_name(); }

 protected:
  std::vector<CompletionChoice> request(const Prompt& prompt, std::size_t n,
                                        const InferenceConfig& config) override {
    return inner_->sample_completions(prompt, n, config).choices;
  }

 private:
  std::shared_ptr<MockTransport> inner_;
};

}  // namespace

Replay Replay::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mock script '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(json::parse(buf.str()));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": malformed JSON: " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Replay Replay::from_json(json doc) {
  if (!doc.is_object()) throw ParseError("mock script must be a JSON object");
  Replay r;
  r.doc_ = std::move(doc);
  if (r.per_task()) {
    if (!r.doc_["tasks"].is_object()) throw ParseError("\"tasks\" must be an object");
    for (const auto& [id, script] : r.doc_["tasks"].items()) MockTransport::from_json(script);
  } else {
    r.shared_ = std::make_shared<MockTransport>(MockTransport::from_json(r.doc_));
  }
  if (r.has_outputs()) CannedExecutor::from_json(r.doc_["outputs"]);
  return r;
}

TransportFactory Replay::transports() {
  if (!per_task()) {
    auto shared = shared_;
    return [shared](const Task&) -> std::unique_ptr<Transport> {
      return std::make_unique<SharedTransport>(shared);
    };
  }
  json tasks = doc_["tasks"];
  return [tasks](const Task& task) -> std::unique_ptr<Transport> {
    if (!tasks.contains(task.id)) {
      throw InvalidArgument("mock script has no entry for task '" + task.id + "'");
    }
    return std::make_unique<MockTransport>(MockTransport::from_json(tasks[task.id]));
  };
}

std::unique_ptr<Transport> Replay::transport_for(const std::string& task_id) const {
  if (!per_task()) return std::make_unique<SharedTransport>(shared_);
  const json& tasks = doc_["tasks"];
  if (!tasks.contains(task_id)) {
    throw InvalidArgument("mock script has no entry for task '" + task_id + "'");
  }
  return std::make_unique<MockTransport>(MockTransport::from_json(tasks[task_id]));
}

CannedExecutor Replay::executor() const {
  if (!has_outputs()) return CannedExecutor({});
  return CannedExecutor::from_json(doc_["outputs"]);
}

}  // namespace tabsynth
