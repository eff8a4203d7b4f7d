#include "tabsynth/tabsynth.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "tabsynth/dataset.hpp"
#include "tabsynth/evaluator.hpp"
#include "tabsynth/replay.hpp"

struct tabsynth_table {
  tabsynth::Table table;
};

struct tabsynth_task {
  tabsynth::Task task;
  tabsynth_table input;
};

struct tabsynth_engine {
  tabsynth_transport_kind transport_kind = TABSYNTH_TRANSPORT_MOCK;
  std::optional<tabsynth::Replay> replay;
  std::optional<tabsynth::HttpTransportOptions> http;
  std::unique_ptr<tabsynth::Executor> executor;
};

namespace {

thread_local std::string last_error;

tabsynth_status fail(tabsynth_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
tabsynth_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TABSYNTH_OK;
  } catch (const tabsynth::InvalidArgument& e) {
    return fail(TABSYNTH_E_INVALID_ARGUMENT, e.what());
  } catch (const tabsynth::ParseError& e) {
    return fail(TABSYNTH_E_PARSE, e.what());
  } catch (const tabsynth::IoError& e) {
    return fail(TABSYNTH_E_IO, e.what());
  } catch (const tabsynth::TransportError& e) {
    return fail(TABSYNTH_E_TRANSPORT, e.what());
  } catch (const std::exception& e) {
    return fail(TABSYNTH_E_INTERNAL, e.what());
  } catch (...) {
    return fail(TABSYNTH_E_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw tabsynth::InvalidArgument(std::string(what) + " must not be NULL");
}

tabsynth::SelectionConfig to_config(const tabsynth_selection* sel) {
  tabsynth::SelectionConfig c;
  if (!sel) return c;
  switch (sel->strategy) {
    case TABSYNTH_STRATEGY_NONE: c.strategy = tabsynth::Strategy::none; break;
    case TABSYNTH_STRATEGY_FIRST: c.strategy = tabsynth::Strategy::first; break;
    case TABSYNTH_STRATEGY_RANDOM: c.strategy = tabsynth::Strategy::random; break;
    case TABSYNTH_STRATEGY_REPRESENTATIVE: c.strategy = tabsynth::Strategy::representative; break;
    case TABSYNTH_STRATEGY_ALL: c.strategy = tabsynth::Strategy::all; break;
    default: throw tabsynth::InvalidArgument("unknown strategy value");
  }
  c.row_budget = sel->row_budget;
  if (sel->has_seed) c.rng_seed = sel->seed;
  return c;
}

tabsynth::InferenceConfig to_config(const tabsynth_inference_options* o) {
  tabsynth_inference_options defaults;
  tabsynth_inference_options_init(&defaults);
  if (!o) o = &defaults;
  tabsynth::InferenceConfig c = tabsynth::InferenceConfig::for_cardinality(o->k, o->budget_factor);
  c.temperature = o->temperature;
  c.parallel_limit = o->parallel_limit;
  c.max_tokens = o->max_tokens;
  c.jobs = o->jobs;
  return c;
}

tabsynth::TableFormat to_format(tabsynth_table_format f) {
  if (f == TABSYNTH_FORMAT_CSV) return tabsynth::TableFormat::csv;
  if (f == TABSYNTH_FORMAT_JSON) return tabsynth::TableFormat::column_major_json;
  throw tabsynth::InvalidArgument("unknown table format");
}

std::unique_ptr<tabsynth::Transport> transport_for(tabsynth_engine& engine, const std::string& id) {
  if (engine.transport_kind == TABSYNTH_TRANSPORT_HTTP) {
    return std::make_unique<tabsynth::HttpTransport>(*engine.http);
  }
  return engine.replay->transport_for(id);
}

std::string model_name(const tabsynth_engine& engine) {
  return engine.transport_kind == TABSYNTH_TRANSPORT_HTTP ? engine.http->model : "mock";
}

tabsynth::json inference_result_json(const tabsynth::InferenceResult& r) {
  using tabsynth::json;
  json doc = json::object();
  doc["completions"] = r.completions;
  doc["programs"] = r.programs;
  json outs = json::array();
  for (const auto& t : r.outputs) outs.push_back(tabsynth::table_to_json(t));
  doc["outputs"] = std::move(outs);
  doc["calls_used"] = r.calls_used;
  doc["requests"] = r.requests;
  doc["batch_sizes"] = r.batch_sizes;
  doc["prompt_rows"] = r.prompt_rows;
  doc["prompt_chars"] = r.prompt_chars;
  doc["aborted"] = r.aborted;
  doc["abort_reason"] = r.abort_reason ? json(*r.abort_reason) : json(nullptr);
  json log = json::array();
  for (const auto& e : r.log) {
    json entry = json::object();
    entry["raw"] = e.raw;
    entry["cleaned"] = e.cleaned;
    entry["rewrite_form"] = e.rewrite_form;
    entry["stage_reached"] = e.stage_reached;
    entry["status"] = e.status;
    entry["rows_executed"] = e.rows_executed;
    entry["error"] = e.error ? json(*e.error) : json(nullptr);
    log.push_back(std::move(entry));
  }
  doc["log"] = std::move(log);
  return doc;
}

}  // namespace

extern "C" {

const char* tabsynth_version(void) { return "0.1.0"; }

const char* tabsynth_last_error(void) { return last_error.c_str(); }

void tabsynth_string_free(char* s) { std::free(s); }

void tabsynth_indices_free(size_t* indices) { std::free(indices); }

void tabsynth_inference_options_init(tabsynth_inference_options* options) {
  if (!options) return;
  options->k = 1;
  options->budget_factor = 8;
  options->temperature = 0.5;
  options->parallel_limit = 8;
  options->max_tokens = 512;
  options->timeout_ms = 5000;
  options->jobs = 1;
}

tabsynth_status tabsynth_parse_strategy(const char* name, tabsynth_strategy* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    switch (tabsynth::parse_strategy(name)) {
      case tabsynth::Strategy::none: *out = TABSYNTH_STRATEGY_NONE; break;
      case tabsynth::Strategy::first: *out = TABSYNTH_STRATEGY_FIRST; break;
      case tabsynth::Strategy::random: *out = TABSYNTH_STRATEGY_RANDOM; break;
      case tabsynth::Strategy::representative: *out = TABSYNTH_STRATEGY_REPRESENTATIVE; break;
      case tabsynth::Strategy::all: *out = TABSYNTH_STRATEGY_ALL; break;
    }
  });
}

tabsynth_status tabsynth_table_parse(const char* data, size_t length, tabsynth_table_format format,
                                     tabsynth_table** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (length > 0) require(data, "data");
    auto t = std::make_unique<tabsynth_table>();
    t->table = tabsynth::parse_table(std::string_view(data ? data : "", length), to_format(format));
    *out = t.release();
  });
}

tabsynth_status tabsynth_table_load(const char* path, tabsynth_table** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<tabsynth_table>();
    t->table = tabsynth::load_table_file(path);
    *out = t.release();
  });
}

void tabsynth_table_free(tabsynth_table* table) { delete table; }

size_t tabsynth_table_row_count(const tabsynth_table* table) {
  return table ? table->table.row_count() : 0;
}

size_t tabsynth_table_column_count(const tabsynth_table* table) {
  return table ? table->table.column_count() : 0;
}

tabsynth_status tabsynth_table_serialize(const tabsynth_table* table, tabsynth_table_format format,
                                         char** out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    *out = dup_string(tabsynth::serialize_table(table->table, to_format(format)));
  });
}

tabsynth_status tabsynth_table_project(const tabsynth_table* table, const size_t* indices,
                                       size_t count, tabsynth_table** out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    *out = nullptr;
    if (count > 0) require(indices, "indices");
    auto t = std::make_unique<tabsynth_table>();
    t->table = tabsynth::project_rows(table->table, std::span<const std::size_t>(indices, count));
    *out = t.release();
  });
}

tabsynth_status tabsynth_task_load(const char* path, tabsynth_task** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<tabsynth_task>();
    t->task = tabsynth::load_task(path);
    t->input.table = t->task.input;
    *out = t.release();
  });
}

void tabsynth_task_free(tabsynth_task* task) { delete task; }

const char* tabsynth_task_id(const tabsynth_task* task) { return task ? task->task.id.c_str() : ""; }

const char* tabsynth_task_query(const tabsynth_task* task) {
  return task ? task->task.query.c_str() : "";
}

const tabsynth_table* tabsynth_task_input(const tabsynth_task* task) {
  return task ? &task->input : nullptr;
}

tabsynth_status tabsynth_profile(const tabsynth_table* table, char** report_json) {
  return guarded([&] {
    require(table, "table");
    require(report_json, "report_json");
    tabsynth::json report = table->table.row_count() == 0
                                ? tabsynth::json{{"columns", tabsynth::json::array()}}
                                : tabsynth::cluster_report(tabsynth::cluster_table(table->table));
    *report_json = dup_string(report.dump());
  });
}

tabsynth_status tabsynth_select(const tabsynth_table* table, const tabsynth_selection* selection,
                                size_t** indices, size_t* count) {
  return guarded([&] {
    require(table, "table");
    require(selection, "selection");
    require(indices, "indices");
    require(count, "count");
    *indices = nullptr;
    *count = 0;
    tabsynth::SelectionConfig cfg = to_config(selection);
    std::optional<tabsynth::ClusterMap> map;
    if (cfg.strategy == tabsynth::Strategy::representative) {
      map = tabsynth::cluster_table(table->table);
    }
    tabsynth::RowSelection rows = tabsynth::select(table->table, map ? &*map : nullptr, cfg);
    size_t* buf = static_cast<size_t*>(std::malloc(std::max<std::size_t>(rows.size(), 1) * sizeof(size_t)));
    if (!buf) throw std::bad_alloc();
    std::copy(rows.begin(), rows.end(), buf);
    *indices = buf;
    *count = rows.size();
  });
}

tabsynth_status tabsynth_build_prompt(const char* query, const tabsynth_table* table,
                                      const tabsynth_selection* selection, char** prompt_text,
                                      size_t* rows_included, size_t* char_count) {
  return guarded([&] {
    require(query, "query");
    require(table, "table");
    require(prompt_text, "prompt_text");
    tabsynth::Prompt p = tabsynth::prompt_for(query, table->table, to_config(selection));
    *prompt_text = dup_string(p.text);
    if (rows_included) *rows_included = p.row_count_included;
    if (char_count) *char_count = p.char_count;
  });
}

tabsynth_status tabsynth_engine_create(const tabsynth_engine_options* options,
                                       tabsynth_engine** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    *out = nullptr;
    auto engine = std::make_unique<tabsynth_engine>();
    engine->transport_kind = options->transport;
    if (options->mock_script) engine->replay = tabsynth::Replay::load(options->mock_script);

    if (options->transport == TABSYNTH_TRANSPORT_HTTP) {
      engine->http = tabsynth::HttpTransportOptions::from_environment();
    } else if (options->transport == TABSYNTH_TRANSPORT_MOCK) {
      if (!engine->replay) throw tabsynth::InvalidArgument("the mock transport needs a mock script");
    } else {
      throw tabsynth::InvalidArgument("unknown transport kind");
    }

    if (options->executor == TABSYNTH_EXECUTOR_CANNED) {
      if (!engine->replay || !engine->replay->has_outputs()) {
        throw tabsynth::InvalidArgument("the canned executor needs a mock script with \"outputs\"");
      }
      engine->executor = std::make_unique<tabsynth::CannedExecutor>(engine->replay->executor());
    } else if (options->executor == TABSYNTH_EXECUTOR_SUBPROCESS) {
      if (options->runner_argc == 0) {
        throw tabsynth::InvalidArgument("the subprocess executor needs a runner command");
      }
      require(options->runner_argv, "runner_argv");
      tabsynth::SubprocessOptions so;
      for (size_t i = 0; i < options->runner_argc; ++i) {
        require(options->runner_argv[i], "runner_argv entry");
        so.command.emplace_back(options->runner_argv[i]);
      }
      so.warm_pool = options->warm_pool;
      engine->executor = std::make_unique<tabsynth::SubprocessExecutor>(std::move(so));
    } else {
      throw tabsynth::InvalidArgument("unknown executor kind");
    }
    *out = engine.release();
  });
}

void tabsynth_engine_free(tabsynth_engine* engine) { delete engine; }

tabsynth_status tabsynth_infer(tabsynth_engine* engine, const char* query,
                               const tabsynth_table* table, const char* task_id,
                               const tabsynth_selection* selection,
                               const tabsynth_inference_options* options, char** result_json) {
  return guarded([&] {
    require(engine, "engine");
    require(query, "query");
    require(table, "table");
    require(result_json, "result_json");
    tabsynth::InferenceOptions inf;
    inf.selection = to_config(selection);
    inf.config = to_config(options);
    inf.timeout_ms = options ? options->timeout_ms : 5000;
    auto transport = transport_for(*engine, task_id ? task_id : "");
    tabsynth::InferenceResult r =
        tabsynth::infer(query, table->table, inf, *transport, *engine->executor);
    tabsynth::json doc = inference_result_json(r);
    doc["model"] = model_name(*engine);
    *result_json = dup_string(doc.dump(2));
  });
}

tabsynth_status tabsynth_eval(tabsynth_engine* engine, const char* suite_dir,
                              const tabsynth_selection* selection,
                              const tabsynth_inference_options* options, const size_t* k_values,
                              size_t k_count, size_t m_factor, char** report_json,
                              char** report_text) {
  return guarded([&] {
    require(engine, "engine");
    require(suite_dir, "suite_dir");
    if (k_count == 0) throw tabsynth::InvalidArgument("at least one k is required");
    require(k_values, "k_values");
    std::vector<tabsynth::Task> tasks = tabsynth::load_suite(suite_dir);

    tabsynth::EvalOptions eo;
    eo.selection = to_config(selection);
    eo.k_values.assign(k_values, k_values + k_count);
    eo.m_factor = m_factor;
    tabsynth_inference_options defaults;
    tabsynth_inference_options_init(&defaults);
    const tabsynth_inference_options* o = options ? options : &defaults;
    eo.budget_factor = o->budget_factor;
    eo.base.temperature = o->temperature;
    eo.base.parallel_limit = o->parallel_limit;
    eo.base.max_tokens = o->max_tokens;
    eo.base.jobs = 1;
    eo.timeout_ms = o->timeout_ms;
    eo.jobs = o->jobs;

    tabsynth::TransportFactory factory;
    if (engine->transport_kind == TABSYNTH_TRANSPORT_HTTP) {
      tabsynth::HttpTransportOptions http = *engine->http;
      factory = [http](const tabsynth::Task&) {
        return std::make_unique<tabsynth::HttpTransport>(http);
      };
    } else {
      factory = engine->replay->transports();
    }
    tabsynth::EvalReport report =
        tabsynth::evaluate(tasks, eo, factory, *engine->executor, model_name(*engine));
    char* js = report_json ? dup_string(report.to_json().dump(2) + "\n") : nullptr;
    try {
      if (report_text) *report_text = dup_string(report.to_text());
    } catch (...) {
      std::free(js);
      throw;
    }
    if (report_json) *report_json = js;
  });
}

}  // extern "C"
