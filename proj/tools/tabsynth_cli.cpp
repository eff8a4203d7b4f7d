// tabsynth command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabsynth/tabsynth.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kToolError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ToolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(tabsynth_status status) {
  if (status != TABSYNTH_OK) throw ToolError(tabsynth_last_error());
}

struct CString {
  char* p = nullptr;
  ~CString() { tabsynth_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct TableHandle {
  tabsynth_table* p = nullptr;
  ~TableHandle() { tabsynth_table_free(p); }
};

struct TaskHandle {
  tabsynth_task* p = nullptr;
  ~TaskHandle() { tabsynth_task_free(p); }
};

struct EngineHandle {
  tabsynth_engine* p = nullptr;
  ~EngineHandle() { tabsynth_engine_free(p); }
};

struct Flags {
  std::string table;
  std::string task;
  std::string suite;
  std::string query;
  std::string strategy = "none";
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string k = "1";
  std::size_t m_factor = 20;
  double temperature = 0.5;
  std::size_t budget_factor = 8;
  int timeout_ms = 5000;
  std::string transport = "http";
  std::string mock_script;
  std::string executor;
  std::string runner = "tabsynth-runner";
  std::size_t warm_pool = 0;
  std::size_t jobs = 1;
  std::string out;
  std::string format = "json";
};

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("--k expects a comma separated list of positive integers, got '" + text + "'");
    }
    std::size_t k = std::stoul(item);
    if (k == 0) throw UsageError("--k values must be at least 1");
    ks.push_back(k);
  }
  if (ks.empty()) throw UsageError("--k must not be empty");
  return ks;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

tabsynth_selection selection_from(const Flags& f) {
  tabsynth_selection sel{};
  if (tabsynth_parse_strategy(f.strategy.c_str(), &sel.strategy) != TABSYNTH_OK) {
    throw UsageError(tabsynth_last_error());
  }
  switch (sel.strategy) {
    case TABSYNTH_STRATEGY_FIRST:
      sel.row_budget = f.n.value_or(1);
      break;
    case TABSYNTH_STRATEGY_RANDOM:
    case TABSYNTH_STRATEGY_REPRESENTATIVE:
      if (!f.n) throw UsageError("--strategy " + f.strategy + " requires --n");
      sel.row_budget = *f.n;
      break;
    default:
      if (f.n) throw UsageError("--n has no effect with --strategy " + f.strategy);
      break;
  }
  if (sel.strategy == TABSYNTH_STRATEGY_RANDOM) {
    if (!f.seed) throw UsageError("--strategy random requires --seed");
    sel.has_seed = 1;
    sel.seed = *f.seed;
  } else if (f.seed) {
    throw UsageError("--seed only applies to --strategy random");
  }
  return sel;
}

tabsynth_inference_options inference_from(const Flags& f) {
  tabsynth_inference_options o;
  tabsynth_inference_options_init(&o);
  o.budget_factor = f.budget_factor;
  o.temperature = f.temperature;
  o.timeout_ms = f.timeout_ms;
  o.jobs = f.jobs;
  return o;
}

// Input table comes from --table or from the input of --task.
struct InputTable {
  TableHandle owned;
  TaskHandle task;
  const tabsynth_table* table = nullptr;
};

void load_input(const Flags& f, InputTable& in) {
  if (!f.task.empty()) {
    check(tabsynth_task_load(f.task.c_str(), &in.task.p));
    in.table = tabsynth_task_input(in.task.p);
  } else {
    check(tabsynth_table_load(f.table.c_str(), &in.owned.p));
    in.table = in.owned.p;
  }
}

void require_one_input(const Flags& f) {
  if (f.table.empty() == f.task.empty()) throw UsageError("exactly one of --table or --task is required");
}

std::string query_for(const Flags& f, const InputTable& in) {
  if (!f.query.empty()) return f.query;
  if (in.task.p) return tabsynth_task_query(in.task.p);
  throw UsageError("--query is required with --table");
}

std::string executor_name(const Flags& f) {
  if (!f.executor.empty()) return f.executor;
  return f.transport == "mock" ? "canned" : "subprocess";
}

void check_engine_flags(const Flags& f) {
  if (f.transport == "mock" && f.mock_script.empty()) {
    throw UsageError("--transport mock requires --mock-script");
  }
  std::string executor = executor_name(f);
  if (executor == "canned" && f.mock_script.empty()) {
    throw UsageError("--executor canned requires --mock-script");
  }
  if (executor == "subprocess" && split_words(f.runner).empty()) {
    throw UsageError("--runner must not be empty");
  }
}

void make_engine(const Flags& f, EngineHandle& engine) {
  tabsynth_engine_options eo{};
  eo.transport = f.transport == "mock" ? TABSYNTH_TRANSPORT_MOCK : TABSYNTH_TRANSPORT_HTTP;
  eo.mock_script = f.mock_script.empty() ? nullptr : f.mock_script.c_str();
  std::string executor = executor_name(f);
  std::vector<std::string> words = split_words(f.runner);
  std::vector<const char*> argv;
  for (const std::string& w : words) argv.push_back(w.c_str());
  eo.executor = executor == "canned" ? TABSYNTH_EXECUTOR_CANNED : TABSYNTH_EXECUTOR_SUBPROCESS;
  eo.runner_argv = argv.data();
  eo.runner_argc = argv.size();
  eo.warm_pool = f.warm_pool;
  check(tabsynth_engine_create(&eo, &engine.p));
}

std::string table_csv(const tabsynth_table* t) {
  CString s;
  check(tabsynth_table_serialize(t, TABSYNTH_FORMAT_CSV, &s.p));
  return s.str();
}

json table_json(const tabsynth_table* t) {
  CString s;
  check(tabsynth_table_serialize(t, TABSYNTH_FORMAT_JSON, &s.p));
  return json::parse(s.str());
}

std::string cmd_profile(const Flags& f) {
  InputTable in;
  load_input(f, in);
  CString report;
  check(tabsynth_profile(in.table, &report.p));
  json doc = json::parse(report.str());
  if (f.format == "json") return doc.dump(2) + "\n";
  std::ostringstream os;
  for (const auto& col : doc["columns"]) {
    os << col["name"].get<std::string>() << "\n";
    for (const auto& c : col["clusters"]) {
      os << "  " << c["cluster_id"].get<std::size_t>() << "  weight " << c["weight"].get<std::size_t>()
         << "  " << c["regex"].get<std::string>() << "  e.g. " << c["example_cell"].get<std::string>()
         << "\n";
    }
  }
  return os.str();
}

std::string cmd_select(const Flags& f) {
  tabsynth_selection sel = selection_from(f);
  InputTable in;
  load_input(f, in);
  size_t* raw = nullptr;
  size_t count = 0;
  check(tabsynth_select(in.table, &sel, &raw, &count));
  std::vector<std::size_t> rows(raw, raw + count);
  tabsynth_indices_free(raw);
  TableHandle picked;
  check(tabsynth_table_project(in.table, rows.data(), rows.size(), &picked.p));
  if (f.format == "json") {
    json doc = json::object();
    doc["strategy"] = f.strategy;
    doc["rows"] = rows;
    doc["table"] = table_json(picked.p);
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "rows:";
  for (std::size_t r : rows) os << ' ' << r;
  os << "\n" << table_csv(picked.p);
  return os.str();
}

std::string cmd_prompt(const Flags& f) {
  tabsynth_selection sel = selection_from(f);
  if (f.query.empty() && f.task.empty()) throw UsageError("--query is required with --table");
  InputTable in;
  load_input(f, in);
  std::string query = query_for(f, in);
  CString text;
  size_t rows = 0, chars = 0;
  check(tabsynth_build_prompt(query.c_str(), in.table, &sel, &text.p, &rows, &chars));
  if (f.format == "json") {
    json doc = json::object();
    doc["prompt"] = text.str();
    doc["rows"] = rows;
    doc["chars"] = chars;
    return doc.dump(2) + "\n";
  }
  return text.str() + "\n\n[rows=" + std::to_string(rows) + " chars=" + std::to_string(chars) +
         "]\n";
}

std::string cmd_infer(const Flags& f) {
  tabsynth_selection sel = selection_from(f);
  std::vector<std::size_t> ks = parse_k_list(f.k);
  if (ks.size() != 1) throw UsageError("infer takes a single --k");
  if (f.query.empty() && f.task.empty()) throw UsageError("--query is required with --table");
  check_engine_flags(f);
  InputTable in;
  load_input(f, in);
  std::string query = query_for(f, in);
  tabsynth_inference_options opts = inference_from(f);
  opts.k = ks.front();
  EngineHandle engine;
  make_engine(f, engine);
  const char* task_id = in.task.p ? tabsynth_task_id(in.task.p) : nullptr;
  CString result;
  check(tabsynth_infer(engine.p, query.c_str(), in.table, task_id, &sel, &opts, &result.p));
  json doc = json::parse(result.str());
  if (f.format == "json") return doc.dump(2) + "\n";
  std::ostringstream os;
  os << "completions: " << doc["completions"].size() << " of " << opts.k << " (calls "
     << doc["calls_used"].get<std::size_t>() << ", requests " << doc["requests"].get<std::size_t>()
     << ")\n";
  if (doc["aborted"].get<bool>()) os << "aborted: " << doc["abort_reason"].get<std::string>() << "\n";
  for (std::size_t i = 0; i < doc["completions"].size(); ++i) {
    os << "\n[" << i << "] " << doc["completions"][i].get<std::string>() << "\n";
  }
  return os.str();
}

std::string cmd_eval(const Flags& f) {
  tabsynth_selection sel = selection_from(f);
  std::vector<std::size_t> ks = parse_k_list(f.k);
  if (f.m_factor == 0) throw UsageError("--m-factor must be at least 1");
  check_engine_flags(f);
  tabsynth_inference_options opts = inference_from(f);
  EngineHandle engine;
  make_engine(f, engine);
  CString js, text;
  check(tabsynth_eval(engine.p, f.suite.c_str(), &sel, &opts, ks.data(), ks.size(), f.m_factor,
                      f.format == "json" ? &js.p : nullptr, f.format == "text" ? &text.p : nullptr));
  return f.format == "json" ? js.str() : text.str();
}

void emit(const Flags& f, const std::string& payload) {
  if (f.out.empty()) {
    std::cout << payload << std::flush;
    return;
  }
  std::ofstream out(f.out, std::ios::binary | std::ios::trunc);
  if (!out) throw ToolError("cannot open '" + f.out + "' for writing");
  out << payload;
  if (!out.flush()) throw ToolError("write to '" + f.out + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;
  CLI::App app{"Table-aware code synthesis pipeline", "tabsynth"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(tabsynth_version()));

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", f.out, "Write results here instead of stdout");
    sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--table", f.table, "Input table (.csv or column-major .json)");
    sub->add_option("--task", f.task, "Task file; supplies table and query");
  };
  auto add_selection = [&](CLI::App* sub) {
    sub->add_option("--strategy", f.strategy, "Row selection strategy")
        ->check(CLI::IsMember({"none", "first", "random", "representative", "all"}));
    sub->add_option("--n", f.n, "Row budget");
    sub->add_option("--seed", f.seed, "Seed for --strategy random");
  };
  auto add_inference = [&](CLI::App* sub) {
    sub->add_option("--k", f.k, "Completions wanted (comma list for eval)");
    sub->add_option("--temperature", f.temperature, "Sampling temperature")
        ->check(CLI::Range(0.0, 2.0));
    sub->add_option("--budget-factor", f.budget_factor, "Completion budget per wanted completion")
        ->check(CLI::PositiveNumber);
    sub->add_option("--timeout-ms", f.timeout_ms, "Per-program execution timeout")
        ->check(CLI::PositiveNumber);
    sub->add_option("--transport", f.transport, "Completion source")
        ->check(CLI::IsMember({"http", "mock"}));
    sub->add_option("--mock-script", f.mock_script, "Replay fixture for the mock transport")
        ->check(CLI::ExistingFile);
    sub->add_option("--executor", f.executor,
                    "Program executor (default: canned with mock, subprocess otherwise)")
        ->check(CLI::IsMember({"subprocess", "canned"}));
    sub->add_option("--runner", f.runner, "Sandbox runner command line");
    sub->add_option("--warm-pool", f.warm_pool, "Runner processes started ahead of demand");
    sub->add_option("--jobs", f.jobs, "Parallelism bound")->check(CLI::PositiveNumber);
  };

  CLI::App* profile = app.add_subcommand("profile", "Cluster each column by syntactic pattern");
  add_input(profile);
  add_common(profile);

  CLI::App* select = app.add_subcommand("select", "Choose rows to show the model");
  add_input(select);
  add_selection(select);
  add_common(select);

  CLI::App* prompt = app.add_subcommand("prompt", "Render the prompt for a query");
  add_input(prompt);
  prompt->add_option("--query", f.query, "Natural-language query");
  add_selection(prompt);
  add_common(prompt);

  CLI::App* infer = app.add_subcommand("infer", "Synthesize programs for one query");
  add_input(infer);
  infer->add_option("--query", f.query, "Natural-language query");
  add_selection(infer);
  add_inference(infer);
  add_common(infer);

  CLI::App* eval = app.add_subcommand("eval", "Score a task suite with pass@k");
  eval->add_option("--suite", f.suite, "Directory of task files")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--m-factor", f.m_factor, "Samples per task as a multiple of max k");
  add_selection(eval);
  add_inference(eval);
  add_common(eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    std::string payload;
    if (sub == profile) {
      require_one_input(f);
      payload = cmd_profile(f);
    } else if (sub == select) {
      require_one_input(f);
      payload = cmd_select(f);
    } else if (sub == prompt) {
      require_one_input(f);
      payload = cmd_prompt(f);
    } else if (sub == infer) {
      require_one_input(f);
      payload = cmd_infer(f);
    } else {
      payload = cmd_eval(f);
    }
    emit(f, payload);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kToolError;
  }
  return kOk;
}
