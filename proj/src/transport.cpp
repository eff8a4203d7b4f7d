#include "tabsynth/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

#ifdef TABSYNTH_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace tabsynth {

InferenceConfig InferenceConfig::for_cardinality(std::size_t k, std::size_t budget_factor) {
  InferenceConfig c;
  c.k = k;
  c.budget_max = budget_factor * k;
  return c;
}

void InferenceConfig::validate() const {
  if (k < 1) throw InvalidArgument("cardinality k must be positive");
  if (budget_max < k) throw InvalidArgument("budget_max must be at least k");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw InvalidArgument("temperature must lie in [0, 2]");
  }
  if (stop_sequences.empty()) throw InvalidArgument("at least one stop sequence is required");
  if (parallel_limit < 1) throw InvalidArgument("parallel limit must be positive");
  if (max_tokens < 1) throw InvalidArgument("max_tokens must be positive");
}

std::size_t next_batch_size(const BatchPlanner& planner, std::size_t parallel_limit) {
  if (planner.needed < 1) throw InvalidArgument("batch sizing needs r >= 1");
  if (planner.remaining_budget < 1) throw InvalidArgument("batch sizing needs B >= 1");
  if (parallel_limit < 1) throw InvalidArgument("parallel limit must be positive");
  double p = planner.validity_estimate;
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("validity estimate must lie in (0, 1]");

  // ceil(r / p), snapping ratios that are integral up to rounding noise
  // (e.g. r = 1, p = 1/3 from counts).
  double ratio = static_cast<double>(planner.needed) / p;
  double nearest = std::round(ratio);
  double wanted = std::abs(ratio - nearest) <= 1e-9 * ratio ? nearest : std::ceil(ratio);
  std::size_t size = static_cast<std::size_t>(wanted);
  return std::min({size, planner.remaining_budget, parallel_limit});
}

BatchPlanner update_estimate(BatchPlanner planner, std::size_t batch_valid,
                             std::size_t batch_total) {
  if (batch_valid > batch_total) {
    throw InvalidArgument("batch reports more valid completions than it contains");
  }
  planner.attempted += batch_total;
  planner.valid_seen += batch_valid;
  if (planner.attempted > 0) {
    double observed =
        static_cast<double>(planner.valid_seen) / static_cast<double>(planner.attempted);
    planner.validity_estimate = std::max(planner.p_floor, observed);
  }
  return planner;
}

SampleResult Transport::sample_completions(const Prompt& prompt, std::size_t count,
                                           const InferenceConfig& config) {
  if (count < 1) throw InvalidArgument("completion count must be positive");
  std::size_t limit = per_request_limit();
  std::vector<std::size_t> sizes;
  for (std::size_t left = count; left > 0;) {
    std::size_t n = limit == 0 ? left : std::min(left, limit);
    sizes.push_back(n);
    left -= n;
  }

  SampleResult result;
  result.requested = count;
  result.requests_issued = sizes.size();
  if (concurrent_requests() && sizes.size() > 1) {
    std::vector<std::future<std::vector<CompletionChoice>>> pending;
    pending.reserve(sizes.size());
    for (std::size_t n : sizes) {
      pending.push_back(std::async(std::launch::async,
                                   [this, &prompt, n, &config] { return request(prompt, n, config); }));
    }
    // get() rethrows; drain all futures first so none outlive this frame.
    std::vector<std::vector<CompletionChoice>> replies;
    std::exception_ptr first_error;
    for (auto& f : pending) {
      try {
        replies.push_back(f.get());
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
    for (auto& r : replies) {
      for (auto& c : r) result.choices.push_back(std::move(c));
    }
  } else {
    for (std::size_t n : sizes) {
      auto r = request(prompt, n, config);
      for (auto& c : r) result.choices.push_back(std::move(c));
    }
  }
  return result;
}

// ---------------------------------------------------------------- mock

MockTransport MockTransport::per_request(Script responses, std::size_t per_request_limit) {
  MockTransport t;
  t.limit_ = per_request_limit;
  t.responses_.assign(std::make_move_iterator(responses.begin()),
                      std::make_move_iterator(responses.end()));
  return t;
}

MockTransport MockTransport::stream(std::vector<CompletionChoice> texts,
                                    std::size_t per_request_limit) {
  MockTransport t;
  t.stream_mode_ = true;
  t.limit_ = per_request_limit;
  t.stream_.assign(std::make_move_iterator(texts.begin()), std::make_move_iterator(texts.end()));
  return t;
}

namespace {

CompletionChoice choice_from_json(const json& entry) {
  if (entry.is_string()) return {entry.get<std::string>(), std::nullopt};
  if (entry.is_object() && entry.contains("error") && entry["error"].is_string()) {
    return {"", entry["error"].get<std::string>()};
  }
  throw ParseError("mock completion must be a string or {\"error\": message}");
}

}  // namespace

MockTransport MockTransport::from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("mock script must be a JSON object");
  std::size_t limit = doc.value("per_request_limit", std::size_t{0});
  if (doc.contains("stream")) {
    if (!doc["stream"].is_array()) throw ParseError("mock \"stream\" must be an array");
    std::vector<CompletionChoice> texts;
    for (const json& e : doc["stream"]) texts.push_back(choice_from_json(e));
    return stream(std::move(texts), limit);
  }
  if (!doc.contains("responses") || !doc["responses"].is_array()) {
    throw ParseError("mock script needs a \"responses\" or \"stream\" array");
  }
  Script script;
  for (const json& req : doc["responses"]) {
    if (!req.is_array()) throw ParseError("each mock response must be an array of texts");
    std::vector<CompletionChoice> texts;
    for (const json& e : req) texts.push_back(choice_from_json(e));
    script.push_back(std::move(texts));
  }
  return per_request(std::move(script), limit);
}

MockTransport::MockTransport(const MockTransport& other) {
  std::lock_guard lock(other.mu_);
  stream_mode_ = other.stream_mode_;
  limit_ = other.limit_;
  responses_ = other.responses_;
  stream_ = other.stream_;
  observed_ = other.observed_;
  prompts_ = other.prompts_;
}

std::vector<std::size_t> MockTransport::observed_requests() const {
  std::lock_guard lock(mu_);
  return observed_;
}

std::vector<std::string> MockTransport::observed_prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

std::vector<CompletionChoice> MockTransport::request(const Prompt& prompt, std::size_t n,
                                                     const InferenceConfig&) {
  std::lock_guard lock(mu_);
  observed_.push_back(n);
  prompts_.push_back(prompt.text);
  std::vector<CompletionChoice> out;
  if (stream_mode_) {
    if (stream_.empty()) throw TransportError("mock script exhausted", false, 1);
    while (out.size() < n && !stream_.empty()) {
      out.push_back(std::move(stream_.front()));
      stream_.pop_front();
    }
    return out;
  }
  if (responses_.empty()) throw TransportError("mock script exhausted", false, 1);
  out = std::move(responses_.front());
  responses_.pop_front();
  if (out.size() > n) out.resize(n);
  return out;
}

// ---------------------------------------------------------------- http

HttpTransportOptions HttpTransportOptions::from_environment() {
  auto env = [](const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  HttpTransportOptions o;
  o.base_url = env("TABSYNTH_ENDPOINT");
  o.api_key = env("TABSYNTH_API_KEY");
  o.model = env("TABSYNTH_MODEL");
  if (o.base_url.empty()) throw InvalidArgument("TABSYNTH_ENDPOINT is not set");
  if (o.model.empty()) throw InvalidArgument("TABSYNTH_MODEL is not set");
  return o;
}

HttpTransport::HttpTransport(HttpTransportOptions options) : options_(std::move(options)) {
  const std::string& url = options_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("endpoint '" + url + "' must include a scheme");
  }
  auto path_start = url.find('/', scheme_end + 3);
  host_ = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/completions";
  if (options_.per_request_limit < 1) options_.per_request_limit = 1;
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

json completion_request_body(const std::string& model, const Prompt& prompt, std::size_t n,
                             const InferenceConfig& config) {
  json body = json::object();
  body["model"] = model;
  body["prompt"] = prompt.text;
  body["n"] = n;
  body["temperature"] = config.temperature;
  body["stop"] = config.stop_sequences;
  body["max_tokens"] = config.max_tokens;
  return body;
}

std::vector<CompletionChoice> parse_completion_reply(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw TransportError("completion reply is not JSON", false, 1);
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array()) {
    throw TransportError("completion reply has no \"choices\" array", false, 1);
  }
  std::vector<CompletionChoice> out;
  for (const json& c : doc["choices"]) {
    if (c.is_object() && c.contains("error") && !c["error"].is_null()) {
      out.push_back({"", c["error"].is_string() ? c["error"].get<std::string>() : c["error"].dump()});
    } else if (c.is_object() && c.value("finish_reason", "") == "content_filter") {
      out.push_back({"", std::string("refused: content_filter")});
    } else if (c.is_object() && c.contains("text") && c["text"].is_string()) {
      out.push_back({c["text"].get<std::string>(), std::nullopt});
    } else {
      throw TransportError("completion choice without text", false, 1);
    }
  }
  return out;
}

std::vector<CompletionChoice> HttpTransport::request(const Prompt& prompt, std::size_t n,
                                                     const InferenceConfig& config) {
  const std::string body = completion_request_body(options_.model, prompt, n, config).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  std::string last_failure;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout_s, 0);
    client.set_read_timeout(options_.timeout_s, 0);
    client.set_write_timeout(options_.timeout_s, 0);
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_failure = "network failure: " + httplib::to_string(res.error());
    } else if (res->status == 401 || res->status == 403) {
      throw TransportError("authentication rejected (HTTP " + std::to_string(res->status) + ")",
                           false, attempt);
    } else if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw TransportError("endpoint returned HTTP " + std::to_string(res->status), false,
                           attempt);
    } else {
      return parse_completion_reply(res->body);
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(options_.retry_delay_ms << (attempt - 1)));
    }
  }
  throw TransportError(last_failure + " after " + std::to_string(options_.max_attempts) +
                           " attempts",
                       true, options_.max_attempts);
}

}  // namespace tabsynth
