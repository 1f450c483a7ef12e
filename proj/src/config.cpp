// SPDX-License-Identifier: Apache-2.0
#include "pforge/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace pforge {

std::optional<std::string> process_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
}

namespace {

using nlohmann::json;

std::string join_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

void interpolate(json& j, const std::string& path, const RunConfig::EnvLookup& env) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) interpolate(it.value(), join_path(path, it.key()), env);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) interpolate(j[i], path + "[" + std::to_string(i) + "]", env);
    } else if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s.find("${") == std::string::npos) return;
        std::string out;
        for (std::size_t i = 0; i < s.size();) {
            if (s.compare(i, 2, "${") == 0) {
                const auto close = s.find('}', i + 2);
                if (close == std::string::npos) throw ConfigError(path, "unterminated ${...}");
                const auto name = s.substr(i + 2, close - i - 2);
                const auto value = env(name);
                if (!value) throw ConfigError(path, "environment variable " + name + " is not set");
                out += *value;
                i = close + 1;
            } else {
                out.push_back(s[i++]);
            }
        }
        j = out;
    }
}

// Object reader that rejects keys it was not told about.
class Node {
public:
    Node(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "$" : path_, "expected object");
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!allowed.count(it.key())) throw ConfigError(join_path(path_, it.key()), "unknown key");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const std::string& key) const { return j_.at(key); }
    std::string path(const std::string& key) const { return join_path(path_, key); }

    template <typename T>
    void read(const std::string& key, T& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path(key), "expected boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(path(key), "expected integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
                    throw ConfigError(path(key), "must be non-negative");
                }
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path(key), "expected number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path(key), "expected string");
        }
        out = v.get<T>();
    }

private:
    const json& j_;
    std::string path_;
};

BackendSpec parse_backend(const json& j, const std::string& path, const RunConfig::EnvLookup& env) {
    Node n(j, path, {"kind", "url", "model", "api_key", "api_key_env", "requests_per_minute", "max_retries", "timeout_s",
                     "fixtures"});
    BackendSpec b;
    std::string kind;
    if (!n.has("kind")) throw ConfigError(n.path("kind"), "missing");
    n.read("kind", kind);
    if (kind == "http") b.kind = BackendKind::Http;
    else if (kind == "template-mock") b.kind = BackendKind::TemplateMock;
    else if (kind == "scripted-mock") b.kind = BackendKind::ScriptedMock;
    else throw ConfigError(n.path("kind"), "expected http, template-mock or scripted-mock, got '" + kind + "'");
    n.read("url", b.url);
    n.read("model", b.model);
    n.read("api_key", b.api_key);
    n.read("requests_per_minute", b.requests_per_minute);
    n.read("max_retries", b.max_retries);
    n.read("timeout_s", b.timeout_s);
    n.read("fixtures", b.fixtures);
    if (n.has("api_key_env")) {
        std::string var;
        n.read("api_key_env", var);
        if (b.api_key.empty()) {
            if (auto v = env(var)) b.api_key = *v;
        }
    }
    if (b.requests_per_minute < 0) throw ConfigError(n.path("requests_per_minute"), "must be >= 0");
    if (b.max_retries < 0) throw ConfigError(n.path("max_retries"), "must be >= 0");
    if (b.timeout_s < 1) throw ConfigError(n.path("timeout_s"), "must be at least 1");
    if (b.kind == BackendKind::Http && b.url.empty()) throw ConfigError(n.path("url"), "required for http backends");
    if (b.kind == BackendKind::ScriptedMock && b.fixtures.empty()) {
        throw ConfigError(n.path("fixtures"), "required for scripted-mock backends");
    }
    return b;
}

}  // namespace

RunConfig RunConfig::mock_defaults() {
    RunConfig c;
    c.backends["mock"] = BackendSpec{};
    for (const char* r : {"refiner", "judge", "target", "prompter_a", "prompter_b"}) c.roles[r] = "mock";
    c.dataset.teacher_plan = {{"mock", 1.0}};
    return c;
}

RunConfig RunConfig::from_json(const json& input, const EnvLookup& env) {
    json j = input;
    const EnvLookup lookup = env ? env : EnvLookup(process_env);
    interpolate(j, "", lookup);
    Node root(j, "", {"backends", "roles", "seed", "temperatures", "budget", "refine", "judge", "evoke", "dataset",
                      "training", "serve", "paths"});
    // No backends and no roles: everything runs on the template mock.
    RunConfig c = root.has("backends") || root.has("roles") ? RunConfig{} : mock_defaults();

    if (root.has("backends")) {
        const auto& b = root.at("backends");
        if (!b.is_object()) throw ConfigError("backends", "expected object");
        for (auto it = b.begin(); it != b.end(); ++it) c.backends[it.key()] = parse_backend(it.value(), "backends." + it.key(), lookup);
    }
    if (root.has("roles")) {
        Node n(root.at("roles"), "roles", {"refiner", "judge", "target", "prompter_a", "prompter_b"});
        for (const char* r : {"refiner", "judge", "target", "prompter_a", "prompter_b"}) {
            std::string v;
            n.read(r, v);
            if (!v.empty()) c.roles[r] = v;
        }
    }
    root.read("seed", c.seed);
    c.dataset.seed = c.seed;
    if (root.has("temperatures")) {
        Node n(root.at("temperatures"), "temperatures", {"generation", "judge"});
        n.read("generation", c.generation_temperature);
        n.read("judge", c.judge_temperature);
        if (c.generation_temperature < 0 || c.generation_temperature > 2) throw ConfigError("temperatures.generation", "must be in [0,2]");
        if (c.judge_temperature < 0 || c.judge_temperature > 2) throw ConfigError("temperatures.judge", "must be in [0,2]");
    }
    if (root.has("budget")) {
        Node n(root.at("budget"), "budget", {"max_calls"});
        if (n.has("max_calls")) {
            std::size_t m = 0;
            n.read("max_calls", m);
            c.max_calls = m;
        }
    }
    if (root.has("refine")) {
        Node n(root.at("refine"), "refine", {"max_parse_retries", "max_capabilities", "use_preference_store", "retrieve_k"});
        n.read("max_parse_retries", c.refine.max_parse_retries);
        n.read("max_capabilities", c.refine.max_capabilities);
        n.read("use_preference_store", c.refine.use_preference_store);
        n.read("retrieve_k", c.refine.retrieve_k);
        if (c.refine.max_parse_retries < 0) throw ConfigError("refine.max_parse_retries", "must be >= 0");
        if (c.refine.max_capabilities < 1) throw ConfigError("refine.max_capabilities", "must be at least 1");
        if (c.refine.retrieve_k < 1) throw ConfigError("refine.retrieve_k", "must be at least 1");
    }
    if (root.has("judge")) {
        Node n(root.at("judge"), "judge", {"base_trials", "max_extra_rounds", "max_parse_retries", "parallelism", "seed"});
        n.read("base_trials", c.judge.base_trials);
        n.read("max_extra_rounds", c.judge.max_extra_rounds);
        n.read("max_parse_retries", c.judge.max_parse_retries);
        n.read("parallelism", c.judge.parallelism);
        n.read("seed", c.judge.seed);
        if (c.judge.base_trials < 1) throw ConfigError("judge.base_trials", "must be at least 1");
        if (c.judge.max_extra_rounds < 0) throw ConfigError("judge.max_extra_rounds", "must be >= 0");
        if (c.judge.parallelism < 1) throw ConfigError("judge.parallelism", "must be at least 1");
    }
    if (root.has("evoke")) {
        Node n(root.at("evoke"), "evoke", {"rounds"});
        n.read("rounds", c.evoke_rounds);
        if (c.evoke_rounds < 1) throw ConfigError("evoke.rounds", "must be at least 1");
    }
    if (root.has("dataset")) {
        Node n(root.at("dataset"), "dataset",
               {"per_domain_target", "per_domain_test", "detailed_share", "teacher_plan", "seed", "filter_threshold",
                "max_attempts_per_domain", "max_rejudge", "workers", "domains", "chat_template"});
        auto& d = c.dataset;
        n.read("per_domain_target", d.per_domain_target);
        n.read("per_domain_test", d.per_domain_test);
        n.read("detailed_share", d.detailed_share);
        n.read("seed", d.seed);
        n.read("filter_threshold", d.filter_threshold);
        n.read("max_attempts_per_domain", d.max_attempts_per_domain);
        n.read("max_rejudge", d.max_rejudge);
        n.read("workers", d.workers);
        n.read("chat_template", c.chat_template);
        if (n.has("teacher_plan")) {
            const auto& tp = n.at("teacher_plan");
            if (!tp.is_object()) throw ConfigError("dataset.teacher_plan", "expected object of backend -> share");
            d.teacher_plan.clear();
            for (auto it = tp.begin(); it != tp.end(); ++it) {
                if (!it.value().is_number()) throw ConfigError("dataset.teacher_plan." + it.key(), "expected number");
                d.teacher_plan[it.key()] = it.value().get<double>();
            }
        }
        if (n.has("domains")) {
            const auto& ds = n.at("domains");
            if (!ds.is_array()) throw ConfigError("dataset.domains", "expected array");
            for (const auto& x : ds) {
                if (!x.is_string()) throw ConfigError("dataset.domains", "expected strings");
                d.domains.push_back(x.get<std::string>());
            }
        }
        try {
            if (!d.teacher_plan.empty()) d.validate();
        } catch (const Error& e) {
            throw ConfigError("dataset", e.what());
        }
    }
    if (root.has("training")) c.training.apply_overrides(root.at("training"));
    if (root.has("serve")) {
        Node n(root.at("serve"), "serve", {"host", "port", "static_dir", "data_dir"});
        n.read("host", c.serve.host);
        n.read("port", c.serve.port);
        n.read("static_dir", c.serve.static_dir);
        n.read("data_dir", c.serve.data_dir);
        if (c.serve.port < 0 || c.serve.port > 65535) throw ConfigError("serve.port", "must be in [0,65535]");
    }
    if (root.has("paths")) {
        Node n(root.at("paths"), "paths", {"templates", "preference_store", "output"});
        n.read("templates", c.templates_dir);
        n.read("preference_store", c.preference_store);
        n.read("output", c.output_dir);
    }
    c.validate();
    return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path, const EnvLookup& env) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("$", path.string() + ": " + e.what());
    }
    return from_json(j, env);
}

void RunConfig::validate() const {
    for (const auto& [role, name] : roles) {
        if (!backends.count(name)) throw ConfigError("roles." + role, "no backend named '" + name + "'");
    }
    for (const auto& [label, share] : dataset.teacher_plan) {
        if (!backends.count(label)) throw ConfigError("dataset.teacher_plan." + label, "no backend named '" + label + "'");
    }
}

std::shared_ptr<Backend> make_backend(const std::string& name, const BackendSpec& spec) {
    switch (spec.kind) {
        case BackendKind::TemplateMock: return std::make_shared<TemplateMockBackend>();
        case BackendKind::ScriptedMock:
            try {
                return ScriptedMockBackend::from_file(spec.fixtures);
            } catch (const Error& e) {
                throw ConfigError("backends." + name + ".fixtures", e.what());
            }
        case BackendKind::Http:
            if (spec.api_key.empty()) throw ConfigError("backends." + name + ".api_key", "no API key configured");
            return std::make_shared<HttpBackend>(
                HttpBackendConfig{spec.url, spec.api_key, std::chrono::seconds(spec.timeout_s)});
    }
    throw ConfigError("backends." + name + ".kind", "unsupported");
}

GatewayFactory::GatewayFactory(const RunConfig& config) : config_(config) {}

Gateway GatewayFactory::backend(const std::string& name) {
    auto it = cache_.find(name);
    if (it == cache_.end()) {
        auto spec_it = config_.backends.find(name);
        if (spec_it == config_.backends.end()) throw ConfigError("backends." + name, "not configured");
        const auto& spec = spec_it->second;
        GatewayOptions opts;
        opts.model = spec.model;
        opts.max_retries = spec.max_retries;
        opts.requests_per_minute = spec.requests_per_minute;
        opts.max_calls = config_.max_calls;
        opts.generation_temperature = config_.generation_temperature;
        opts.judge_temperature = config_.judge_temperature;
        it = cache_.emplace(name, Gateway(make_backend(name, spec), opts)).first;
    }
    return it->second.fork();
}

bool GatewayFactory::has_role(const std::string& role) const { return config_.roles.count(role) > 0; }

Gateway GatewayFactory::role(const std::string& role) {
    auto it = config_.roles.find(role);
    if (it == config_.roles.end()) throw ConfigError("roles." + role, "no backend assigned");
    return backend(it->second);
}

}  // namespace pforge
