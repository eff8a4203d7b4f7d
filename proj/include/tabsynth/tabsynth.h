/*
 * tabsynth C API.
 *
 * Every function returning tabsynth_status reports failures through the
 * status code; tabsynth_last_error() then describes the most recent failure
 * on the calling thread. Strings returned through char** out-parameters are
 * heap-allocated and must be released with tabsynth_string_free(). Handles
 * are opaque and released with their matching *_free function; passing NULL
 * to any *_free function is a no-op.
 */
#ifndef TABSYNTH_H
#define TABSYNTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define TABSYNTH_API __declspec(dllexport)
#else
#  define TABSYNTH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tabsynth_status {
  TABSYNTH_OK = 0,
  TABSYNTH_E_INVALID_ARGUMENT = 1,
  TABSYNTH_E_PARSE = 2,
  TABSYNTH_E_IO = 3,
  TABSYNTH_E_TRANSPORT = 4,
  TABSYNTH_E_INTERNAL = 5
} tabsynth_status;

typedef enum tabsynth_table_format {
  TABSYNTH_FORMAT_CSV = 0,
  TABSYNTH_FORMAT_JSON = 1 /* {"columns": [[name, [cells...]], ...]} */
} tabsynth_table_format;

typedef enum tabsynth_strategy {
  TABSYNTH_STRATEGY_NONE = 0,
  TABSYNTH_STRATEGY_FIRST = 1,
  TABSYNTH_STRATEGY_RANDOM = 2,
  TABSYNTH_STRATEGY_REPRESENTATIVE = 3,
  TABSYNTH_STRATEGY_ALL = 4
} tabsynth_strategy;

typedef enum tabsynth_transport_kind {
  TABSYNTH_TRANSPORT_MOCK = 0,
  TABSYNTH_TRANSPORT_HTTP = 1 /* TABSYNTH_ENDPOINT / TABSYNTH_API_KEY / TABSYNTH_MODEL */
} tabsynth_transport_kind;

typedef enum tabsynth_executor_kind {
  TABSYNTH_EXECUTOR_SUBPROCESS = 0,
  TABSYNTH_EXECUTOR_CANNED = 1 /* "outputs" of the mock script */
} tabsynth_executor_kind;

typedef struct tabsynth_table tabsynth_table;
typedef struct tabsynth_task tabsynth_task;
typedef struct tabsynth_engine tabsynth_engine;

typedef struct tabsynth_selection {
  tabsynth_strategy strategy;
  size_t row_budget;
  int has_seed;
  uint64_t seed;
} tabsynth_selection;

typedef struct tabsynth_inference_options {
  size_t k;
  size_t budget_factor; /* budget = budget_factor * k */
  double temperature;
  size_t parallel_limit;
  size_t max_tokens;
  int timeout_ms;
  size_t jobs;
} tabsynth_inference_options;

typedef struct tabsynth_engine_options {
  tabsynth_transport_kind transport;
  const char* mock_script; /* required for the mock transport and the canned executor */
  tabsynth_executor_kind executor;
  const char* const* runner_argv; /* sandbox runner command for the subprocess executor */
  size_t runner_argc;
  size_t warm_pool;
} tabsynth_engine_options;

TABSYNTH_API const char* tabsynth_version(void);
TABSYNTH_API const char* tabsynth_last_error(void);
TABSYNTH_API void tabsynth_string_free(char* s);
TABSYNTH_API void tabsynth_indices_free(size_t* indices);

TABSYNTH_API void tabsynth_inference_options_init(tabsynth_inference_options* options);
TABSYNTH_API tabsynth_status tabsynth_parse_strategy(const char* name, tabsynth_strategy* out);

/* Tables */
TABSYNTH_API tabsynth_status tabsynth_table_parse(const char* data, size_t length,
                                                  tabsynth_table_format format,
                                                  tabsynth_table** out);
/* Format follows the extension: .csv is CSV, anything else column-major JSON. */
TABSYNTH_API tabsynth_status tabsynth_table_load(const char* path, tabsynth_table** out);
TABSYNTH_API void tabsynth_table_free(tabsynth_table* table);
TABSYNTH_API size_t tabsynth_table_row_count(const tabsynth_table* table);
TABSYNTH_API size_t tabsynth_table_column_count(const tabsynth_table* table);
TABSYNTH_API tabsynth_status tabsynth_table_serialize(const tabsynth_table* table,
                                                      tabsynth_table_format format, char** out);
TABSYNTH_API tabsynth_status tabsynth_table_project(const tabsynth_table* table,
                                                    const size_t* indices, size_t count,
                                                    tabsynth_table** out);

/* Tasks */
TABSYNTH_API tabsynth_status tabsynth_task_load(const char* path, tabsynth_task** out);
TABSYNTH_API void tabsynth_task_free(tabsynth_task* task);
TABSYNTH_API const char* tabsynth_task_id(const tabsynth_task* task);
TABSYNTH_API const char* tabsynth_task_query(const tabsynth_task* task);
/* Borrowed; valid while the task lives. */
TABSYNTH_API const tabsynth_table* tabsynth_task_input(const tabsynth_task* task);

/* Pipeline stages */
TABSYNTH_API tabsynth_status tabsynth_profile(const tabsynth_table* table, char** report_json);
TABSYNTH_API tabsynth_status tabsynth_select(const tabsynth_table* table,
                                             const tabsynth_selection* selection,
                                             size_t** indices, size_t* count);
TABSYNTH_API tabsynth_status tabsynth_build_prompt(const char* query, const tabsynth_table* table,
                                                   const tabsynth_selection* selection,
                                                   char** prompt_text, size_t* rows_included,
                                                   size_t* char_count);

/* Engines bundle a completion transport with a program executor. */
TABSYNTH_API tabsynth_status tabsynth_engine_create(const tabsynth_engine_options* options,
                                                    tabsynth_engine** out);
TABSYNTH_API void tabsynth_engine_free(tabsynth_engine* engine);

/* task_id selects the per-task script of a per-task mock fixture; may be NULL. */
TABSYNTH_API tabsynth_status tabsynth_infer(tabsynth_engine* engine, const char* query,
                                            const tabsynth_table* table, const char* task_id,
                                            const tabsynth_selection* selection,
                                            const tabsynth_inference_options* options,
                                            char** result_json);

/* options->k is ignored; m = m_factor * max(k_values) valid completions are
 * sampled per task. Either report pointer may be NULL. */
TABSYNTH_API tabsynth_status tabsynth_eval(tabsynth_engine* engine, const char* suite_dir,
                                           const tabsynth_selection* selection,
                                           const tabsynth_inference_options* options,
                                           const size_t* k_values, size_t k_count,
                                           size_t m_factor, char** report_json,
                                           char** report_text);

#ifdef __cplusplus
}
#endif

#endif /* TABSYNTH_H */
