#include "tabsynth/evaluator.hpp"

#include <algorithm>
#include <future>
#include <iomanip>
#include <sstream>

namespace tabsynth {

double pass_at_k(std::size_t m, std::size_t s, std::size_t k) {
  if (k < 1) throw InvalidArgument("pass@k needs k >= 1");
  if (k > m) {
    throw InvalidArgument("pass@k needs k <= m (k=" + std::to_string(k) +
                          ", m=" + std::to_string(m) + ")");
  }
  if (s > m) throw InvalidArgument("correct count exceeds valid count");
  if (m - s < k) return 1.0;
  // C(m-s, k) / C(m, k) = prod_{j<k} (m-s-j) / (m-j)
  double ratio = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    ratio *= static_cast<double>(m - s - j) / static_cast<double>(m - j);
  }
  return 1.0 - ratio;
}

double pass_at_k_shortfall(std::size_t m, std::size_t s, std::size_t k) {
  if (s > m) throw InvalidArgument("correct count exceeds valid count");
  if (m >= k && m > 0) return pass_at_k(m, s, k);
  return s > 0 ? 1.0 : 0.0;
}

namespace {

TaskEvalStats evaluate_task(const Task& task, const EvalOptions& options,
                            const TransportFactory& make_transport, Executor& executor,
                            ClusterCache& cache) {
  TaskEvalStats stats;
  stats.task_id = task.id;
  stats.task_class = task.task_class;
  stats.strategy = std::string(to_string(options.selection.strategy));
  const std::size_t k_max = *std::max_element(options.k_values.begin(), options.k_values.end());
  stats.m_target = options.m_factor * k_max;

  try {
    InferenceOptions inf;
    inf.selection = options.selection;
    inf.config = options.base;
    inf.config.k = stats.m_target;
    inf.config.budget_max = options.budget_factor * stats.m_target;
    inf.timeout_ms = options.timeout_ms;
    inf.cluster_cache = &cache;

    std::unique_ptr<Transport> transport = make_transport(task);
    InferenceResult r = infer(task.query, task.input, inf, *transport, executor);
    stats.m = r.outputs.size();
    stats.calls_used = r.calls_used;
    for (const Table& out : r.outputs) {
      if (outputs_match(task.expected, out, task.match_options).matched) ++stats.s;
    }
    if (r.aborted) stats.error = r.abort_reason;
  } catch (const std::exception& e) {
    stats.error = e.what();
  }
  stats.shortfall = stats.m < stats.m_target;
  for (std::size_t k : options.k_values) {
    stats.pass_at[k] = pass_at_k_shortfall(stats.m, stats.s, k);
  }
  return stats;
}

std::string k_label(std::size_t k) { return "pass@" + std::to_string(k); }

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

EvalReport evaluate(const std::vector<Task>& tasks, const EvalOptions& options,
                    const TransportFactory& make_transport, Executor& executor,
                    const std::string& model_name) {
  if (tasks.empty()) throw InvalidArgument("no tasks to evaluate");
  if (options.k_values.empty()) throw InvalidArgument("at least one k is required");
  for (std::size_t k : options.k_values) {
    if (k < 1) throw InvalidArgument("k values must be positive");
  }
  if (options.m_factor < 1) throw InvalidArgument("m factor must be positive");

  std::vector<const Task*> ordered;
  for (const Task& t : tasks) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const Task* a, const Task* b) { return a->id < b->id; });

  ClusterCache cache;
  EvalReport report;
  report.k_values = options.k_values;
  std::sort(report.k_values.begin(), report.k_values.end());
  report.k_values.erase(std::unique(report.k_values.begin(), report.k_values.end()),
                        report.k_values.end());
  report.tasks.resize(ordered.size());

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  for (std::size_t start = 0; start < ordered.size(); start += jobs) {
    std::size_t end = std::min(ordered.size(), start + jobs);
    if (jobs == 1) {
      report.tasks[start] = evaluate_task(*ordered[start], options, make_transport, executor, cache);
      continue;
    }
    std::vector<std::future<TaskEvalStats>> wave;
    for (std::size_t i = start; i < end; ++i) {
      wave.push_back(std::async(std::launch::async, [&, i] {
        return evaluate_task(*ordered[i], options, make_transport, executor, cache);
      }));
    }
    for (std::size_t i = start; i < end; ++i) report.tasks[i] = wave[i - start].get();
  }

  auto summarize = [&](const std::string& label, auto&& include) {
    ClassSummary row;
    row.label = label;
    for (std::size_t k : report.k_values) row.pass_at[k] = 0.0;
    for (const TaskEvalStats& t : report.tasks) {
      if (!include(t)) continue;
      ++row.tasks;
      for (std::size_t k : report.k_values) row.pass_at[k] += t.pass_at.at(k);
    }
    if (row.tasks == 0) return;
    for (auto& [k, v] : row.pass_at) v /= static_cast<double>(row.tasks);
    report.summary.push_back(std::move(row));
  };
  summarize("all", [](const TaskEvalStats&) { return true; });
  for (TaskClass c : {TaskClass::ind, TaskClass::dep, TaskClass::ext}) {
    summarize(std::string(to_string(c)), [c](const TaskEvalStats& t) { return t.task_class == c; });
  }

  json meta = json::object();
  meta["strategy"] = std::string(to_string(options.selection.strategy));
  meta["n"] = options.selection.row_budget;
  meta["seed"] = options.selection.rng_seed ? json(*options.selection.rng_seed) : json(nullptr);
  meta["model"] = model_name;
  meta["k_values"] = report.k_values;
  meta["m_factor"] = options.m_factor;
  meta["budget_factor"] = options.budget_factor;
  meta["temperature"] = options.base.temperature;
  report.metadata = std::move(meta);
  return report;
}

json EvalReport::to_json() const {
  json doc = json::object();
  doc["metadata"] = metadata;
  json ts = json::array();
  for (const TaskEvalStats& t : tasks) {
    json row = json::object();
    row["task_id"] = t.task_id;
    row["class"] = std::string(to_string(t.task_class));
    row["strategy"] = t.strategy;
    row["m"] = t.m;
    row["s"] = t.s;
    row["m_target"] = t.m_target;
    row["shortfall"] = t.shortfall;
    row["calls_used"] = t.calls_used;
    json pk = json::object();
    for (const auto& [k, v] : t.pass_at) pk[k_label(k)] = v;
    row["pass_at"] = std::move(pk);
    row["error"] = t.error ? json(*t.error) : json(nullptr);
    ts.push_back(std::move(row));
  }
  doc["tasks"] = std::move(ts);
  json sum = json::array();
  for (const ClassSummary& s : summary) {
    json row = json::object();
    row["class"] = s.label;
    row["tasks"] = s.tasks;
    json pk = json::object();
    for (const auto& [k, v] : s.pass_at) pk[k_label(k)] = v;
    row["pass_at"] = std::move(pk);
    sum.push_back(std::move(row));
  }
  doc["summary"] = std::move(sum);
  return doc;
}

std::string EvalReport::to_text() const {
  std::size_t id_width = 4;
  for (const TaskEvalStats& t : tasks) id_width = std::max(id_width, t.task_id.size());

  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(id_width)) << "task" << "  class  "
     << std::right << std::setw(5) << "m" << std::setw(5) << "s";
  for (std::size_t k : k_values) os << std::setw(10) << k_label(k);
  os << "  note\n";
  for (const TaskEvalStats& t : tasks) {
    os << std::left << std::setw(static_cast<int>(id_width)) << t.task_id << "  "
       << std::setw(5) << to_string(t.task_class) << "  " << std::right << std::setw(5) << t.m
       << std::setw(5) << t.s;
    for (std::size_t k : k_values) os << std::setw(10) << fixed4(t.pass_at.at(k));
    os << "  ";
    if (t.shortfall) os << "shortfall ";
    if (t.error) os << "error: " << *t.error;
    os << '\n';
  }
  os << '\n'
     << std::left << std::setw(6) << "class" << std::right << std::setw(7) << "tasks";
  for (std::size_t k : k_values) os << std::setw(10) << k_label(k);
  os << '\n';
  for (const ClassSummary& s : summary) {
    os << std::left << std::setw(6) << s.label << std::right << std::setw(7) << s.tasks;
    for (std::size_t k : k_values) os << std::setw(10) << fixed4(s.pass_at.at(k));
    os << '\n';
  }
  return os.str();
}

}  // namespace tabsynth
