#include "tabsynth/inference.hpp"

#include <algorithm>
#include <future>
#include <unordered_set>

#include "tabsynth/validator.hpp"

namespace tabsynth {

std::uint64_t table_content_hash(const Table& table) {
  // FNV-1a over a length-prefixed encoding of names and cells.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::string_view s) {
    std::uint64_t len = s.size();
    for (int i = 0; i < 8; ++i) {
      h ^= (len >> (8 * i)) & 0xFF;
      h *= 1099511628211ull;
    }
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const Column& c : table.columns()) {
    mix(c.name);
    for (const std::string& cell : c.cells) mix(cell);
  }
  return h;
}

std::shared_ptr<const ClusterMap> ClusterCache::get(const Table& table) {
  const std::uint64_t key = table_content_hash(table);
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      for (const Entry& e : it->second) {
        if (e.table == table) return e.map;
      }
    }
  }
  auto map = std::make_shared<const ClusterMap>(cluster_table(table));
  std::lock_guard lock(mu_);
  auto& bucket = entries_[key];
  for (const Entry& e : bucket) {
    if (e.table == table) return e.map;
  }
  bucket.push_back({table, map});
  return map;
}

std::size_t ClusterCache::size() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [k, v] : entries_) n += v.size();
  return n;
}

Prompt prompt_for(std::string_view query, const Table& table, const SelectionConfig& selection,
                  ClusterCache* cache, RowSelection* chosen) {
  std::shared_ptr<const ClusterMap> map;
  if (selection.strategy == Strategy::representative) {
    map = cache ? cache->get(table) : std::make_shared<const ClusterMap>(cluster_table(table));
  }
  RowSelection rows = select(table, map.get(), selection);
  Prompt p = build_prompt(query, project_rows(table, rows));
  if (chosen) *chosen = std::move(rows);
  return p;
}

namespace {

struct Pending {
  Completion completion;
  std::optional<std::string> refusal;
  std::optional<ExecOutput> output;
};

void run_executions(std::vector<Pending>& batch, Executor& executor, int timeout_ms,
                    std::size_t jobs) {
  auto run_one = [&](Pending& p) {
    if (p.refusal || !p.completion.program) return;
    ExecRequest req{*p.completion.program, p.completion.output_var, timeout_ms,
                    p.completion.cleaned};
    p.output = executor.execute(req);
  };
  if (jobs <= 1) {
    for (Pending& p : batch) run_one(p);
    return;
  }
  for (std::size_t start = 0; start < batch.size(); start += jobs) {
    std::vector<std::future<void>> wave;
    std::size_t end = std::min(batch.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i) {
      wave.push_back(std::async(std::launch::async, [&, i] { run_one(batch[i]); }));
    }
    for (auto& f : wave) f.get();
  }
}

}  // namespace

InferenceResult infer(std::string_view query, const Table& table, const InferenceOptions& options,
                      Transport& transport, Executor& executor) {
  const InferenceConfig& config = options.config;
  config.validate();

  InferenceResult result;
  Prompt prompt = prompt_for(query, table, options.selection, options.cluster_cache,
                             &result.prompt_rows);
  result.prompt_chars = prompt.char_count;
  const std::string preamble = render_dataframe(table);

  std::unordered_set<std::string> seen;
  BatchPlanner planner;
  planner.remaining_budget = config.budget_max;

  while (planner.remaining_budget > 0 && result.completions.size() < config.k) {
    planner.needed = config.k - result.completions.size();
    const std::size_t n = next_batch_size(planner, config.parallel_limit);

    SampleResult sample;
    try {
      sample = transport.sample_completions(prompt, n, config);
    } catch (const TransportError& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }
    planner.remaining_budget -= n;
    result.calls_used += n;
    result.requests += sample.requests_issued;
    result.batch_sizes.push_back(n);

    std::vector<Pending> batch;
    batch.reserve(sample.choices.size());
    for (CompletionChoice& choice : sample.choices) {
      Pending p;
      if (choice.error) {
        p.refusal = choice.error;
        p.completion.raw = std::move(choice.text);
      } else {
        p.completion = process_completion(choice.text, preamble);
      }
      batch.push_back(std::move(p));
    }
    run_executions(batch, executor, options.timeout_ms, config.jobs);

    std::size_t batch_valid = 0;
    for (Pending& p : batch) {
      CompletionLog entry;
      entry.raw = p.completion.raw;
      entry.cleaned = p.completion.cleaned;
      entry.rewrite_form = std::string(to_string(p.completion.form));
      if (p.refusal) {
        entry.stage_reached = "transport";
        entry.status = "refused";
        entry.error = p.refusal;
      } else if (!p.completion.program) {
        entry.stage_reached = "rewrite";
        entry.status = "no-rewrite";
      } else {
        entry.rows_executed = table.row_count();
        const ExecOutput& out = *p.output;
        entry.error = out.error_message;
        if (out.status != ExecStatus::ok) {
          entry.stage_reached = "exec";
          entry.status = std::string(to_string(out.status));
        } else if (!is_valid(out, table)) {
          entry.stage_reached = "validate";
          entry.status = "invalid-shape";
        } else {
          ++batch_valid;
          entry.stage_reached = "accept";
          if (seen.count(p.completion.cleaned)) {
            entry.status = "duplicate";
          } else if (result.completions.size() >= config.k) {
            entry.status = "surplus";
          } else {
            entry.status = "accepted";
            seen.insert(p.completion.cleaned);
            result.completions.push_back(p.completion.cleaned);
            result.programs.push_back(*p.completion.program);
            result.outputs.push_back(*out.value);
          }
        }
      }
      result.log.push_back(std::move(entry));
    }
    planner = update_estimate(planner, batch_valid, n);
  }
  return result;
}

}  // namespace tabsynth
