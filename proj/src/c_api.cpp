// SPDX-License-Identifier: Apache-2.0
#include "pforge/pforge.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>

#include "pforge/assess_http.hpp"
#include "pforge/baselines.hpp"
#include "pforge/config.hpp"
#include "pforge/datagen.hpp"
#include "pforge/evaluate.hpp"
#include "pforge/version.hpp"

using namespace pforge;

struct pforge_engine {
    RunConfig config;
    TemplateSet templates;
    GatewayFactory factory;
    std::unique_ptr<PreferenceStore> store;
    std::mutex mutex;

    explicit pforge_engine(RunConfig c)
        : config(std::move(c)), templates(TemplateSet::with_overrides(config.templates_dir)), factory(config) {
        if (!config.preference_store.empty()) store = std::make_unique<PreferenceStore>(config.preference_store);
    }
};

struct pforge_server {
    std::unique_ptr<AssessService> service;
    std::unique_ptr<AssessServer> server;
};

namespace {

thread_local std::string t_last_error;

pforge_status status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Config: return PFORGE_ERR_CONFIG;
        case ErrorCode::Schema:
        case ErrorCode::Cardinality:
        case ErrorCode::MissingSuggestions:
        case ErrorCode::InvalidText: return PFORGE_ERR_SCHEMA;
        case ErrorCode::Transport: return PFORGE_ERR_TRANSPORT;
        case ErrorCode::BackendRefusal:
        case ErrorCode::UnknownPurpose: return PFORGE_ERR_BACKEND;
        case ErrorCode::BudgetExceeded: return PFORGE_ERR_BUDGET;
        case ErrorCode::TurnParse:
        case ErrorCode::JudgeParse: return PFORGE_ERR_PARSE;
        case ErrorCode::Validation:
        case ErrorCode::OutOfRangeScore:
        case ErrorCode::Template: return PFORGE_ERR_VALIDATION;
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownParticipant: return PFORGE_ERR_NOT_FOUND;
        case ErrorCode::DuplicateJudgment: return PFORGE_ERR_CONFLICT;
        case ErrorCode::Storage:
        case ErrorCode::Io: return PFORGE_ERR_IO;
        case ErrorCode::GenerationExhausted: return PFORGE_ERR_EXHAUSTED;
    }
    return PFORGE_ERR_INTERNAL;
}

struct NullArgument : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Fn>
pforge_status guard(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return PFORGE_OK;
    } catch (const NullArgument& e) {
        t_last_error = e.what();
        return PFORGE_ERR_INVALID_ARGUMENT;
    } catch (const Error& e) {
        t_last_error = e.what();
        return status_for(e.code());
    } catch (const nlohmann::json::exception& e) {
        t_last_error = std::string("invalid JSON: ") + e.what();
        return PFORGE_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return PFORGE_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown failure";
        return PFORGE_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void require(const void* p, const char* what) {
    if (!p) throw NullArgument(std::string(what) + " must not be NULL");
}

Json ledger_json(const Gateway& g) {
    Json out = Json::array();
    for (const auto& e : g.ledger().entries()) {
        out.push_back({{"purpose_tag", e.purpose_tag},
                       {"outcome", to_string(e.outcome)},
                       {"attempts", e.attempts},
                       {"request_digest", e.request_digest}});
    }
    return out;
}

UserRequest parse_request(const char* request_json) {
    require(request_json, "request_json");
    Json j = Json::parse(request_json);
    // "intent" is accepted as shorthand for "intent_text".
    if (j.is_object() && j.contains("intent") && !j.contains("intent_text")) {
        j["intent_text"] = j["intent"];
        j.erase("intent");
    }
    return user_request_from_json(j);
}

Json scored_json(const ScoredRecord& r) {
    return {{"record_id", r.record.record_id},
            {"kind", to_string(r.record.kind)},
            {"text", r.record.text},
            {"score", r.score}};
}

}  // namespace

extern "C" {

const char* pforge_version(void) { return kVersion; }

const char* pforge_status_name(pforge_status status) {
    switch (status) {
        case PFORGE_OK: return "ok";
        case PFORGE_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case PFORGE_ERR_CONFIG: return "config";
        case PFORGE_ERR_SCHEMA: return "schema";
        case PFORGE_ERR_TRANSPORT: return "transport";
        case PFORGE_ERR_BACKEND: return "backend";
        case PFORGE_ERR_BUDGET: return "budget";
        case PFORGE_ERR_PARSE: return "parse";
        case PFORGE_ERR_VALIDATION: return "validation";
        case PFORGE_ERR_NOT_FOUND: return "not_found";
        case PFORGE_ERR_CONFLICT: return "conflict";
        case PFORGE_ERR_IO: return "io";
        case PFORGE_ERR_EXHAUSTED: return "exhausted";
        case PFORGE_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* pforge_last_error(void) { return t_last_error.c_str(); }

void pforge_free_string(char* s) { std::free(s); }

pforge_status pforge_engine_create(const char* config_json, pforge_engine** out) {
    return guard([&] {
        require(out, "out");
        *out = nullptr;
        RunConfig config = RunConfig::mock_defaults();
        if (config_json) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(config_json);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("$", e.what());
            }
            config = RunConfig::from_json(j);
        }
        *out = new pforge_engine(std::move(config));
    });
}

void pforge_engine_destroy(pforge_engine* engine) { delete engine; }

pforge_status pforge_refine(pforge_engine* engine, const char* request_json, char** result_json) {
    return guard([&] {
        require(engine, "engine");
        require(result_json, "result_json");
        const auto request = parse_request(request_json);
        std::lock_guard lock(engine->mutex);
        RefinePipeline pipeline(engine->factory.role("refiner"), engine->templates, engine->config.refine,
                                engine->store.get());
        const auto r = pipeline.run(request);
        Json out = Json::object();
        out["analysis"] = to_json(r.analysis);
        out["report"] = to_json(r.report);
        out["final"] = to_json(r.final);
        out["calls_used"] = r.calls_used;
        out["parse_retries"] = r.parse_retries;
        out["retrieved"] = Json::array();
        for (const auto& s : r.retrieved) out["retrieved"].push_back(scored_json(s));
        out["ledger"] = ledger_json(pipeline.gateway());
        *result_json = dup_string(out.dump());
    });
}

pforge_status pforge_run_strategy(pforge_engine* engine, const char* strategy, const char* request_json,
                                  char** result_json) {
    return guard([&] {
        require(engine, "engine");
        require(strategy, "strategy");
        require(result_json, "result_json");
        const auto kind = strategy_from_string(strategy);
        const auto request = parse_request(request_json);
        std::lock_guard lock(engine->mutex);
        Gateway gateway = engine->factory.role("refiner");
        StrategyOptions opts{engine->config.evoke_rounds, engine->config.refine, engine->store.get()};
        const auto outcome = run_strategy(kind, request, gateway, engine->templates, opts);
        Json out = Json::object();
        out["strategy"] = to_string(outcome.strategy);
        out["prompt"] = outcome.prompt;
        out["calls_used"] = outcome.calls_used;
        out["ledger"] = ledger_json(gateway);
        *result_json = dup_string(out.dump());
    });
}

pforge_status pforge_build_dataset(pforge_engine* engine, const char* out_dir, int flags, char** summary_json) {
    return guard([&] {
        require(engine, "engine");
        require(out_dir, "out_dir");
        std::lock_guard lock(engine->mutex);
        DatasetConfig dc = engine->config.dataset;
        if (dc.teacher_plan.empty()) {
            const auto it = engine->config.roles.find("refiner");
            if (it == engine->config.roles.end()) throw ConfigError("dataset.teacher_plan", "no teachers configured");
            dc.teacher_plan = {{it->second, 1.0}};
        }
        std::map<std::string, Gateway> teachers;
        for (const auto& [label, share] : dc.teacher_plan) teachers.emplace(label, engine->factory.backend(label));
        Gateway judge = engine->factory.role("judge");
        const auto chat = (flags & PFORGE_EXPORT_CHAT) ? std::optional(ChatTemplate::load(engine->templates, engine->config.chat_template))
                                                       : std::nullopt;

        const auto result = build_dataset(dc, teachers, judge, engine->templates, engine->config.refine);
        const std::filesystem::path dir(out_dir);
        write_dataset(result, dir);

        Json summary = result.manifest.summary_json();
        if (chat) {
            std::map<std::string, Split> split_of;
            for (const auto& r : result.manifest.records) split_of[r.dialogue_id] = r.split;
            std::ofstream out(dir / "chat.jsonl");
            for (const auto& d : result.dialogues) {
                Json line = Json::object();
                line["dialogue_id"] = d.dialogue_id;
                line["split"] = to_string(split_of[d.dialogue_id]);
                line["text"] = export_chat_format(d, *chat, engine->templates);
                out << line.dump() << '\n';
            }
            if (!out) throw Error(ErrorCode::Io, "failed writing chat.jsonl");
            summary["chat_export"] = (dir / "chat.jsonl").string();
        }
        if (flags & PFORGE_EXPORT_TRAIN_CONFIG) {
            Json tc = export_training_config(engine->config.training);
            tc["chat_template"] = engine->config.chat_template;
            std::ofstream out(dir / "train_config.json");
            out << tc.dump(2) << '\n';
            if (!out) throw Error(ErrorCode::Io, "failed writing train_config.json");
            summary["train_config"] = (dir / "train_config.json").string();
        }
        if (summary_json) *summary_json = dup_string(summary.dump());
    });
}

pforge_status pforge_training_config(pforge_engine* engine, char** config_json) {
    return guard([&] {
        require(engine, "engine");
        require(config_json, "config_json");
        Json tc = export_training_config(engine->config.training);
        tc["chat_template"] = engine->config.chat_template;
        *config_json = dup_string(tc.dump(2));
    });
}

pforge_status pforge_evaluate(pforge_engine* engine, const char* tasks_path, const char* strategy_a,
                              const char* strategy_b, const char* out_dir, char** result_json) {
    return guard([&] {
        require(engine, "engine");
        require(tasks_path, "tasks_path");
        require(strategy_a, "strategy_a");
        require(strategy_b, "strategy_b");
        require(result_json, "result_json");
        const auto a = strategy_from_string(strategy_a);
        const auto b = strategy_from_string(strategy_b);
        std::lock_guard lock(engine->mutex);
        auto& f = engine->factory;
        Gateway judge = f.role("judge");
        Gateway target = f.role("target");
        Gateway pa = f.has_role("prompter_a") ? f.role("prompter_a") : f.role("refiner");
        Gateway pb = f.has_role("prompter_b") ? f.role("prompter_b") : f.role("refiner");
        const auto tasks = load_eval_tasks(tasks_path);
        StrategyOptions opts{engine->config.evoke_rounds, engine->config.refine, engine->store.get()};
        const auto model = engine->config.roles.count("target") ? engine->config.backends.at(engine->config.roles.at("target")).model
                                                                : std::string();
        const auto r = evaluate(tasks, a, b, EvaluateGateways{pa, pb, target, judge}, engine->templates, opts,
                                engine->config.judge, model);
        CountTable table{{r.suite.row}};
        if (out_dir) {
            const std::filesystem::path dir(out_dir);
            std::filesystem::create_directories(dir);
            write_verdicts(r.suite.verdicts, dir / "verdicts.jsonl");
            std::ofstream rec(dir / "records.jsonl");
            for (const auto& x : r.records) rec << to_json(x).dump() << '\n';
            std::ofstream csv(dir / "table.csv");
            csv << table.to_csv();
            if (!rec || !csv) throw Error(ErrorCode::Io, "failed writing evaluation artifacts to " + dir.string());
        }
        const auto& row = r.suite.row;
        Json out = Json::object();
        out["row"] = {{"model", row.model},
                      {"comparison", row.comparison},
                      {"first_better", row.first_better},
                      {"second_better", row.second_better},
                      {"same", row.same},
                      {"failed", row.failed}};
        out["text"] = table.to_text();
        out["csv"] = table.to_csv();
        out["records"] = Json::array();
        for (const auto& x : r.records) out["records"].push_back(to_json(x));
        *result_json = dup_string(out.dump());
    });
}

pforge_status pforge_validate_turn(const char* turn, const char* raw, char** canonical_json) {
    return guard([&] {
        require(turn, "turn");
        require(raw, "raw");
        require(canonical_json, "canonical_json");
        const std::string t(turn);
        Json j;
        if (t == "turn2") j = to_json(validate_intent_analysis(raw));
        else if (t == "turn3") j = to_json(validate_optimization_report(raw));
        else if (t == "turn4") j = to_json(validate_optimized_prompt(raw));
        else throw Error(ErrorCode::Validation, "turn must be turn2, turn3 or turn4");
        *canonical_json = dup_string(canonical_payload(j));
    });
}

pforge_status pforge_server_create(const char* data_dir, const char* static_dir, pforge_server** out) {
    return guard([&] {
        require(out, "out");
        *out = nullptr;
        auto s = std::make_unique<pforge_server>();
        s->service = std::make_unique<AssessService>(data_dir ? std::filesystem::path(data_dir) : std::filesystem::path());
        s->server = std::make_unique<AssessServer>(*s->service,
                                                   static_dir ? std::filesystem::path(static_dir) : std::filesystem::path());
        *out = s.release();
    });
}

pforge_status pforge_server_bind(pforge_server* server, const char* host, int port, int* bound_port) {
    return guard([&] {
        require(server, "server");
        const int p = server->server->bind(host ? host : "127.0.0.1", port);
        if (bound_port) *bound_port = p;
    });
}

pforge_status pforge_server_run(pforge_server* server) {
    return guard([&] {
        require(server, "server");
        server->server->run();
    });
}

void pforge_server_stop(pforge_server* server) {
    if (server) server->server->stop();
}

void pforge_server_destroy(pforge_server* server) { delete server; }

}  // extern "C"
