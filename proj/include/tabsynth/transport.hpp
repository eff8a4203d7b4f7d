#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tabsynth/json_io.hpp"
#include "tabsynth/prompt.hpp"

namespace tabsynth {

struct InferenceConfig {
  std::size_t k = 1;
  std::size_t budget_max = 8;
  double temperature = 0.5;
  std::vector<std::string> stop_sequences{"\n#", "</code>"};
  std::size_t parallel_limit = 8;
  std::size_t max_tokens = 512;
  std::size_t jobs = 1;  // concurrent executions per batch

  // k with budget_max = budget_factor * k.
  static InferenceConfig for_cardinality(std::size_t k, std::size_t budget_factor = 8);
  void validate() const;
};

// State of the adaptive batch sizing between iterations.
struct BatchPlanner {
  static constexpr double default_p_floor = 0.05;

  std::size_t remaining_budget = 0;
  std::size_t needed = 0;
  double validity_estimate = 1.0;
  std::size_t attempted = 0;
  std::size_t valid_seen = 0;
  double p_floor = default_p_floor;
};

// min(ceil(needed / p), remaining_budget, parallel_limit).
std::size_t next_batch_size(const BatchPlanner& planner, std::size_t parallel_limit);

// Folds one batch into the cumulative validity estimate.
BatchPlanner update_estimate(BatchPlanner planner, std::size_t batch_valid,
                             std::size_t batch_total);

struct CompletionChoice {
  std::string text;
  std::optional<std::string> error;  // provider refused this completion
};

struct SampleResult {
  std::vector<CompletionChoice> choices;  // ordered by (request, choice)
  std::size_t requested = 0;
  std::size_t requests_issued = 0;
  bool truncated() const { return choices.size() < requested; }
};

class Transport {
 public:
  virtual ~Transport() = default;

  // Issues ceil(count / per_request_limit()) requests and concatenates their
  // choices in request order. Texts are returned as the provider sent them.
  SampleResult sample_completions(const Prompt& prompt, std::size_t count,
                                  const InferenceConfig& config);

  virtual std::string model_name() const = 0;

 protected:
  // 0 means no per-request cap.
  virtual std::size_t per_request_limit() const { return 0; }
  virtual bool concurrent_requests() const { return false; }
  virtual std::vector<CompletionChoice> request(const Prompt& prompt, std::size_t n,
                                                const InferenceConfig& config) = 0;
};

// Replays canned completions. In per-request mode every request consumes the
// next script entry (truncated to n); in stream mode every request takes the
// next n texts from one flat queue.
class MockTransport : public Transport {
 public:
  using Script = std::vector<std::vector<CompletionChoice>>;

  static MockTransport per_request(Script responses, std::size_t per_request_limit = 0);
  static MockTransport stream(std::vector<CompletionChoice> texts,
                              std::size_t per_request_limit = 0);
  // {"responses": [[text | {"error": msg}, ...], ...]} or {"stream": [...]},
  // plus an optional "per_request_limit".
  static MockTransport from_json(const json& doc);

  MockTransport(const MockTransport& other);
  MockTransport& operator=(const MockTransport&) = delete;

  std::string model_name() const override { return "mock"; }

  // n of every request served so far, in order.
  std::vector<std::size_t> observed_requests() const;
  std::vector<std::string> observed_prompts() const;

 protected:
  std::size_t per_request_limit() const override { return limit_; }
  std::vector<CompletionChoice> request(const Prompt& prompt, std::size_t n,
                                        const InferenceConfig& config) override;

 private:
  MockTransport() = default;

  bool stream_mode_ = false;
  std::size_t limit_ = 0;
  std::deque<std::vector<CompletionChoice>> responses_;
  std::deque<CompletionChoice> stream_;
  mutable std::mutex mu_;
  std::vector<std::size_t> observed_;
  std::vector<std::string> prompts_;
};

struct HttpTransportOptions {
  std::string base_url;  // e.g. https://host/v1 ; requests go to <base_url>/completions
  std::string api_key;
  std::string model;
  std::size_t per_request_limit = 128;
  int max_attempts = 3;
  int retry_delay_ms = 250;
  int timeout_s = 120;

  // TABSYNTH_ENDPOINT, TABSYNTH_API_KEY, TABSYNTH_MODEL.
  static HttpTransportOptions from_environment();
};

// JSON completions endpoint: POST {model, prompt, n, temperature, stop,
// max_tokens}; reply {"choices": [{"text", "finish_reason"?, "error"?}]}.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(HttpTransportOptions options);
  std::string model_name() const override { return options_.model; }

 protected:
  std::size_t per_request_limit() const override { return options_.per_request_limit; }
  bool concurrent_requests() const override { return true; }
  std::vector<CompletionChoice> request(const Prompt& prompt, std::size_t n,
                                        const InferenceConfig& config) override;

 private:
  HttpTransportOptions options_;
  std::string host_;  // scheme://host[:port]
  std::string path_;  // path prefix + /completions
};

json completion_request_body(const std::string& model, const Prompt& prompt, std::size_t n,
                             const InferenceConfig& config);
// Throws TransportError (terminal) on a reply that is not the expected shape.
std::vector<CompletionChoice> parse_completion_reply(const std::string& body);

}  // namespace tabsynth
