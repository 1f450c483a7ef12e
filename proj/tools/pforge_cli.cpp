// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library only through the C API.
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pforge/pforge.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Globals {
    std::string config_path;
    std::string backend;
    bool verbose = false;
};

struct Failure {
    int code;
    std::string message;
};

int exit_code_for(pforge_status s) {
    if (s == PFORGE_OK) return kExitOk;
    return s == PFORGE_ERR_CONFIG ? kExitConfig : kExitFailure;
}

void check(pforge_status s, const char* what) {
    if (s == PFORGE_OK) return;
    throw Failure{exit_code_for(s), std::string(what) + " failed (" + pforge_status_name(s) + "): " + pforge_last_error()};
}

// Owns a string handed out by the library.
struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { pforge_free_string(p); }
    std::string str() const { return p ? std::string(p) : std::string(); }
};

json load_config(const Globals& g) {
    json cfg = json::object();
    if (!g.config_path.empty()) {
        std::ifstream in(g.config_path);
        if (!in) throw Failure{kExitConfig, "config error: $: cannot read " + g.config_path};
        try {
            cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw Failure{kExitConfig, "config error: $: " + std::string(e.what())};
        }
        if (!cfg.is_object()) throw Failure{kExitConfig, "config error: $: expected object"};
    }
    const bool use_mock = g.backend == "template-mock" || (g.config_path.empty() && g.backend.empty());
    if (use_mock) {
        cfg["backends"]["mock"] = {{"kind", "template-mock"}};
        for (const char* r : {"refiner", "judge", "target", "prompter_a", "prompter_b"}) cfg["roles"][r] = "mock";
        if (cfg.contains("dataset") && cfg["dataset"].contains("teacher_plan")) cfg["dataset"].erase("teacher_plan");
    } else if (!g.backend.empty()) {
        for (const char* r : {"refiner", "judge", "target", "prompter_a", "prompter_b"}) cfg["roles"][r] = g.backend;
    }
    return cfg;
}

struct Engine {
    pforge_engine* e = nullptr;
    explicit Engine(const json& cfg) {
        const auto s = pforge_engine_create(cfg.dump().c_str(), &e);
        if (s == PFORGE_ERR_CONFIG) throw Failure{kExitConfig, std::string("config error: ") + pforge_last_error()};
        check(s, "engine setup");
    }
    ~Engine() { pforge_engine_destroy(e); }
};

void log(const Globals& g, const std::string& line) {
    if (g.verbose) std::cerr << line << '\n';
}

int run_refine(const Globals& g, const std::string& intent, const std::vector<std::string>& prefs,
               const std::string& user, bool use_prefs, const std::string& store, bool as_json) {
    json cfg = load_config(g);
    if (use_prefs) cfg["refine"]["use_preference_store"] = true;
    if (!store.empty()) cfg["paths"]["preference_store"] = store;
    Engine engine(cfg);

    json request = {{"intent_text", intent}, {"preferences", prefs}};
    if (!user.empty()) request["user_id"] = user;
    OwnedString out;
    check(pforge_refine(engine.e, request.dump().c_str(), &out.p), "refine");
    const json result = json::parse(out.str());

    for (const auto& r : result["retrieved"]) {
        log(g, "retrieved " + r["kind"].get<std::string>() + ": " + r["text"].get<std::string>() +
                   " (score " + std::to_string(r["score"].get<double>()) + ")");
    }
    for (const auto& e : result["ledger"]) {
        log(g, "call " + e["purpose_tag"].get<std::string>() + " " + e["outcome"].get<std::string>());
    }
    if (as_json) {
        std::cout << result.dump(2) << '\n';
    } else {
        std::cout << result["final"]["optimized_prompt"].get<std::string>() << "\n\n";
    }
    std::cout << "calls: " << result["calls_used"].get<int>() << '\n';
    return kExitOk;
}

int run_strategy(const Globals& g, const std::string& strategy, const std::string& intent,
                 const std::vector<std::string>& prefs) {
    Engine engine(load_config(g));
    json request = {{"intent_text", intent}, {"preferences", prefs}};
    OwnedString out;
    check(pforge_run_strategy(engine.e, strategy.c_str(), request.dump().c_str(), &out.p), "strategy");
    const json result = json::parse(out.str());
    std::cout << result["prompt"].get<std::string>() << "\n\n";
    std::cout << "calls: " << result["calls_used"].get<int>() << '\n';
    return kExitOk;
}

struct DatasetFlags {
    std::string out;
    std::optional<int> per_domain;
    std::optional<int> test;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::vector<std::string> domains;
    bool export_chat = false;
    bool export_train_config = false;
};

int run_dataset(const Globals& g, const DatasetFlags& f) {
    json cfg = load_config(g);
    if (f.per_domain) cfg["dataset"]["per_domain_target"] = *f.per_domain;
    if (f.test) cfg["dataset"]["per_domain_test"] = *f.test;
    if (f.seed) cfg["dataset"]["seed"] = *f.seed;
    if (f.workers) cfg["dataset"]["workers"] = *f.workers;
    if (!f.domains.empty()) cfg["dataset"]["domains"] = f.domains;
    std::string out_dir = f.out;
    if (out_dir.empty()) {
        out_dir = cfg.contains("paths") && cfg["paths"].contains("output") && cfg["paths"]["output"].is_string()
                      ? cfg["paths"]["output"].get<std::string>()
                      : std::string("out");
    }
    Engine engine(cfg);
    const int flags = (f.export_chat ? PFORGE_EXPORT_CHAT : 0) | (f.export_train_config ? PFORGE_EXPORT_TRAIN_CONFIG : 0);
    log(g, "building dataset into " + out_dir);
    OwnedString out;
    check(pforge_build_dataset(engine.e, out_dir.c_str(), flags, &out.p), "dataset");
    const json summary = json::parse(out.str());
    std::cout << "kept: " << summary["kept"] << "\ntrain: " << summary["train"] << "\ntest: " << summary["test"]
              << "\noutput: " << out_dir << '\n';
    return kExitOk;
}

int run_evaluate(const Globals& g, const std::string& tasks, const std::string& a, const std::string& b,
                 const std::string& out_dir, bool csv) {
    Engine engine(load_config(g));
    OwnedString out;
    check(pforge_evaluate(engine.e, tasks.c_str(), a.c_str(), b.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), &out.p),
          "evaluate");
    const json result = json::parse(out.str());
    std::cout << (csv ? result["csv"] : result["text"]).get<std::string>();
    return kExitOk;
}

int run_train_config(const Globals& g, const std::string& out_path) {
    Engine engine(load_config(g));
    OwnedString out;
    check(pforge_training_config(engine.e, &out.p), "training config");
    if (out_path.empty()) {
        std::cout << out.str() << '\n';
    } else {
        std::ofstream f(out_path);
        f << out.str() << '\n';
        if (!f) throw Failure{kExitFailure, "cannot write " + out_path};
    }
    return kExitOk;
}

int run_serve(const Globals& g, std::string host, std::optional<int> port, std::string static_dir, std::string data_dir) {
    // Only the serve section matters here, but read the whole file so bad configs fail the same way.
    const json cfg = load_config(g);
    Engine engine(cfg);
    const json serve = cfg.value("serve", json::object());
    if (host.empty()) host = serve.value("host", "127.0.0.1");
    if (!port) port = serve.value("port", 8080);
    if (static_dir.empty()) static_dir = serve.value("static_dir", "");
    if (data_dir.empty()) data_dir = serve.value("data_dir", "sessions");

    // Block termination signals so a dedicated thread can receive them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    pforge_server* server = nullptr;
    check(pforge_server_create(data_dir.c_str(), static_dir.empty() ? nullptr : static_dir.c_str(), &server),
          "server setup");
    int bound = 0;
    const auto s = pforge_server_bind(server, host.c_str(), *port, &bound);
    if (s != PFORGE_OK) {
        pforge_server_destroy(server);
        check(s, "bind");
    }
    std::cerr << "listening on http://" << host << ":" << bound << '\n';

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        pforge_server_stop(server);
    });
    const auto rs = pforge_server_run(server);
    if (waiter.joinable()) {
        // run returned without a signal; wake the waiter.
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    pforge_server_destroy(server);
    check(rs, "serve");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prompt refinement, dataset generation and pairwise evaluation"};
    app.set_version_flag("--version", pforge_version());
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("-c,--config", g.config_path, "Run configuration (JSON)");
    app.add_option("--backend", g.backend, "template-mock, or a backend name from the config bound to every role");
    app.add_flag("-v,--verbose", g.verbose, "Log details to stderr");

    auto* refine = app.add_subcommand("refine", "Turn an intent into an optimized prompt");
    std::string intent, user, store;
    std::vector<std::string> prefs;
    bool use_prefs = false, as_json = false;
    refine->add_option("-i,--intent", intent, "User intent")->required();
    refine->add_option("-p,--pref", prefs, "Preference statement (repeatable)");
    refine->add_option("-u,--user", user, "User id for preference retrieval");
    refine->add_flag("--use-prefs", use_prefs, "Retrieve stored preferences for the user");
    refine->add_option("--store", store, "Preference store file (JSONL)");
    refine->add_flag("--json", as_json, "Print the full result as JSON");

    auto* strategy = app.add_subcommand("strategy", "Run one prompt strategy");
    std::string strategy_name = "original";
    strategy->add_option("-s,--strategy", strategy_name, "original, cot, expert, evoke or refine");
    strategy->add_option("-i,--intent", intent, "User intent")->required();
    strategy->add_option("-p,--pref", prefs, "Preference statement (repeatable)");

    auto* dataset = app.add_subcommand("dataset", "Generate the synthetic dialogue corpus");
    DatasetFlags df;
    dataset->add_option("-o,--out", df.out, "Output directory");
    dataset->add_option("--per-domain", df.per_domain, "Kept dialogues per domain");
    dataset->add_option("--test", df.test, "Test dialogues per domain");
    dataset->add_option("--seed", df.seed, "Dataset seed");
    dataset->add_option("--workers", df.workers, "Parallel domain workers");
    dataset->add_option("--domains", df.domains, "Restrict to these domain ids")->delimiter(',');
    dataset->add_flag("--export-chat", df.export_chat, "Also write chat.jsonl in the configured chat template");
    dataset->add_flag("--export-train-config", df.export_train_config, "Also write train_config.json");

    auto* evaluate = app.add_subcommand("evaluate", "Compare two strategies with the pairwise judge");
    std::string tasks, strat_a = "original", strat_b = "refine", eval_out;
    bool csv = false;
    evaluate->add_option("-t,--tasks", tasks, "Tasks file (JSONL)")->required();
    evaluate->add_option("-a,--strategy-a", strat_a, "First strategy");
    evaluate->add_option("-b,--strategy-b", strat_b, "Second strategy");
    evaluate->add_option("-o,--out", eval_out, "Directory for verdicts and records");
    evaluate->add_flag("--csv", csv, "Print the table as CSV");

    auto* train = app.add_subcommand("train-config", "Print the fine-tuning configuration");
    std::string train_out;
    train->add_option("-o,--out", train_out, "Write to this file instead of stdout");

    auto* serve = app.add_subcommand("serve", "Run the human assessment service");
    std::string host, static_dir, data_dir;
    std::optional<int> port;
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--static-dir", static_dir, "Directory served at /");
    serve->add_option("--data-dir", data_dir, "Session storage directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*refine) return run_refine(g, intent, prefs, user, use_prefs, store, as_json);
        if (*strategy) return run_strategy(g, strategy_name, intent, prefs);
        if (*dataset) return run_dataset(g, df);
        if (*evaluate) return run_evaluate(g, tasks, strat_a, strat_b, eval_out, csv);
        if (*train) return run_train_config(g, train_out);
        if (*serve) return run_serve(g, host, port, static_dir, data_dir);
    } catch (const Failure& f) {
        std::cerr << "pforge: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "pforge: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
