/* SPDX-License-Identifier: Apache-2.0 */
#ifndef PFORGE_H
#define PFORGE_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PFORGE_API __declspec(dllexport)
#else
#define PFORGE_API __attribute__((visibility("default")))
#endif

/* All strings are UTF-8. Strings returned through char** are owned by the caller
 * and released with pforge_free_string. Structured data crosses as JSON text. */

typedef struct pforge_engine pforge_engine;
typedef struct pforge_server pforge_server;

typedef enum pforge_status {
    PFORGE_OK = 0,
    PFORGE_ERR_INVALID_ARGUMENT = 1,
    PFORGE_ERR_CONFIG = 2,
    PFORGE_ERR_SCHEMA = 3,
    PFORGE_ERR_TRANSPORT = 4,
    PFORGE_ERR_BACKEND = 5,
    PFORGE_ERR_BUDGET = 6,
    PFORGE_ERR_PARSE = 7,
    PFORGE_ERR_VALIDATION = 8,
    PFORGE_ERR_NOT_FOUND = 9,
    PFORGE_ERR_CONFLICT = 10,
    PFORGE_ERR_IO = 11,
    PFORGE_ERR_EXHAUSTED = 12,
    PFORGE_ERR_INTERNAL = 13
} pforge_status;

enum {
    PFORGE_EXPORT_CHAT = 1,
    PFORGE_EXPORT_TRAIN_CONFIG = 2
};

PFORGE_API const char* pforge_version(void);
PFORGE_API const char* pforge_status_name(pforge_status status);
/* Message for the last failure on the calling thread; empty after a success. */
PFORGE_API const char* pforge_last_error(void);
PFORGE_API void pforge_free_string(char* s);

/* config_json may be NULL for an offline template-mock setup. */
PFORGE_API pforge_status pforge_engine_create(const char* config_json, pforge_engine** out);
PFORGE_API void pforge_engine_destroy(pforge_engine* engine);

/* request_json: {"intent_text", "preferences"?, "user_id"?}.
 * result: {"analysis", "report", "final", "calls_used", "parse_retries", "retrieved", "ledger"}. */
PFORGE_API pforge_status pforge_refine(pforge_engine* engine, const char* request_json, char** result_json);

/* strategy: original | cot | expert | evoke | refine.
 * result: {"strategy", "prompt", "calls_used", "ledger"}. */
PFORGE_API pforge_status pforge_run_strategy(pforge_engine* engine, const char* strategy, const char* request_json,
                                             char** result_json);

/* Builds the corpus described by the engine config into out_dir. flags: PFORGE_EXPORT_*. */
PFORGE_API pforge_status pforge_build_dataset(pforge_engine* engine, const char* out_dir, int flags,
                                              char** summary_json);

PFORGE_API pforge_status pforge_training_config(pforge_engine* engine, char** config_json);

/* tasks_path: JSONL of {"task_id"?, "intent", "preferences"?}. out_dir may be NULL.
 * result: {"row", "text", "csv", "records"}. */
PFORGE_API pforge_status pforge_evaluate(pforge_engine* engine, const char* tasks_path, const char* strategy_a,
                                         const char* strategy_b, const char* out_dir, char** result_json);

/* turn: "turn2" | "turn3" | "turn4". On success returns the canonical payload. */
PFORGE_API pforge_status pforge_validate_turn(const char* turn, const char* raw, char** canonical_json);

/* Human assessment server. data_dir and static_dir may be NULL. */
PFORGE_API pforge_status pforge_server_create(const char* data_dir, const char* static_dir, pforge_server** out);
/* port 0 picks a free port; the bound port is written to bound_port when non-NULL. */
PFORGE_API pforge_status pforge_server_bind(pforge_server* server, const char* host, int port, int* bound_port);
/* Blocks until pforge_server_stop is called from another thread. */
PFORGE_API pforge_status pforge_server_run(pforge_server* server);
PFORGE_API void pforge_server_stop(pforge_server* server);
PFORGE_API void pforge_server_destroy(pforge_server* server);

#ifdef __cplusplus
}
#endif

#endif /* PFORGE_H */
