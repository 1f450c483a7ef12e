// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library through its C header only.
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "pforge/pforge.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: failed: %s (last error: %s)\n", __FILE__, __LINE__, #cond, pforge_last_error()); \
            ++failures;                                                \
        }                                                              \
    } while (0)

int main(int argc, char** argv) {
    const char* scratch = argc > 1 ? argv[1] : ".";
    char path[1024];
    char* out = NULL;
    pforge_engine* engine = NULL;

    EXPECT(strlen(pforge_version()) > 0);
    EXPECT(strcmp(pforge_status_name(PFORGE_ERR_CONFIG), "config") == 0);

    EXPECT(pforge_engine_create("{\"nonsense\": 1}", &engine) == PFORGE_ERR_CONFIG);
    EXPECT(engine == NULL);
    EXPECT(strstr(pforge_last_error(), "nonsense") != NULL);
    EXPECT(pforge_engine_create(NULL, NULL) == PFORGE_ERR_INVALID_ARGUMENT);

    EXPECT(pforge_engine_create(NULL, &engine) == PFORGE_OK);
    EXPECT(engine != NULL);

    EXPECT(pforge_refine(engine, "{\"intent\": \"Summarize a research article for a newsletter\"}", &out) == PFORGE_OK);
    EXPECT(out && strstr(out, "\"calls_used\":3") != NULL);
    pforge_free_string(out);
    out = NULL;

    EXPECT(pforge_refine(engine, "{\"intent\": \"\"}", &out) == PFORGE_ERR_SCHEMA);
    EXPECT(out == NULL);

    EXPECT(pforge_run_strategy(engine, "evoke", "{\"intent\": \"Write a haiku about rain\"}", &out) == PFORGE_OK);
    EXPECT(out && strstr(out, "\"calls_used\":9") != NULL);
    pforge_free_string(out);
    out = NULL;
    EXPECT(pforge_run_strategy(engine, "magic", "{\"intent\": \"x\"}", &out) == PFORGE_ERR_VALIDATION);

    EXPECT(pforge_training_config(engine, &out) == PFORGE_OK);
    EXPECT(out && strstr(out, "\"total_batch\": 32") != NULL);
    pforge_free_string(out);
    out = NULL;

    EXPECT(pforge_validate_turn("turn4", "{\"optimized_prompt\": \"Be brief.\"}", &out) == PFORGE_OK);
    pforge_free_string(out);
    out = NULL;
    EXPECT(pforge_validate_turn("turn3", "{\"optimization_suggestions\": []}", &out) != PFORGE_OK);
    EXPECT(pforge_validate_turn("turn9", "{}", &out) == PFORGE_ERR_VALIDATION);
    pforge_engine_destroy(engine);
    engine = NULL;

    EXPECT(pforge_engine_create("{\"dataset\": {\"per_domain_target\": 2, \"per_domain_test\": 1, "
                                "\"domains\": [\"travel-and-tourism\", \"health-and-medicine\"]}}",
                                &engine) == PFORGE_OK);
    snprintf(path, sizeof path, "%s/capi_dataset", scratch);
    EXPECT(pforge_build_dataset(engine, path, PFORGE_EXPORT_CHAT | PFORGE_EXPORT_TRAIN_CONFIG, &out) == PFORGE_OK);
    EXPECT(out && strstr(out, "\"kept\":4") != NULL && strstr(out, "\"test\":2") != NULL);
    pforge_free_string(out);
    out = NULL;
    snprintf(path, sizeof path, "%s/capi_dataset/chat.jsonl", scratch);
    FILE* f = fopen(path, "r");
    EXPECT(f != NULL);
    if (f) fclose(f);
    pforge_engine_destroy(engine);

    pforge_server* server = NULL;
    int port = 0;
    snprintf(path, sizeof path, "%s/capi_sessions", scratch);
    EXPECT(pforge_server_create(path, NULL, &server) == PFORGE_OK);
    EXPECT(pforge_server_bind(server, "127.0.0.1", 0, &port) == PFORGE_OK);
    EXPECT(port > 0);
    pforge_server* clash = NULL;
    EXPECT(pforge_server_create(path, NULL, &clash) == PFORGE_OK);
    EXPECT(pforge_server_bind(clash, "127.0.0.1", port, NULL) == PFORGE_ERR_IO);
    pforge_server_destroy(clash);
    pforge_server_destroy(server);

    if (failures) {
        fprintf(stderr, "%d C API check(s) failed\n", failures);
        return 1;
    }
    printf("C API checks passed\n");
    return 0;
}
