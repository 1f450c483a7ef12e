// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "pforge/datagen.hpp"
#include "pforge/gateway.hpp"
#include "pforge/judge.hpp"
#include "pforge/pipeline.hpp"

namespace pforge {

enum class BackendKind { Http, TemplateMock, ScriptedMock };

struct BackendSpec {
    BackendKind kind = BackendKind::TemplateMock;
    std::string url;
    std::string model = "default";
    std::string api_key;
    double requests_per_minute = 0.0;
    int max_retries = 2;
    int timeout_s = 120;
    std::string fixtures;  // scripted-mock fixture file
};

struct ServeConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    std::string data_dir = "sessions";
};

// One declarative document for every command. Strings may use ${VAR} to pull from the
// environment. Unknown keys are errors; ConfigError carries the offending field path.
struct RunConfig {
    std::map<std::string, BackendSpec> backends;
    // Role -> backend name. Roles: refiner, judge, target, prompter_a, prompter_b.
    std::map<std::string, std::string> roles;
    std::uint64_t seed = 42;
    double generation_temperature = 0.7;
    double judge_temperature = 0.0;
    std::optional<std::size_t> max_calls;

    PipelineOptions refine;
    JudgeOptions judge;
    int evoke_rounds = 3;
    DatasetConfig dataset;
    std::string chat_template = "llama3";
    TrainingConfig training;
    ServeConfig serve;

    std::string templates_dir;
    std::string preference_store;
    std::string output_dir = "out";

    using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

    static RunConfig from_json(const nlohmann::json& j, const EnvLookup& env = {});
    static RunConfig from_file(const std::filesystem::path& path, const EnvLookup& env = {});
    // A single template-mock backend named "mock" bound to every role.
    static RunConfig mock_defaults();

    // Every role and dataset teacher must name a configured backend. Throws ConfigError.
    void validate() const;
};

std::optional<std::string> process_env(const std::string& name);

// Builds gateways from a RunConfig, one shared backend per name.
class GatewayFactory {
public:
    explicit GatewayFactory(const RunConfig& config);

    // Fresh-ledger gateway for the named backend. Throws ConfigError for unknown names.
    Gateway backend(const std::string& name);
    // Throws ConfigError("roles.<role>", ...) when the role is unbound.
    Gateway role(const std::string& role);
    bool has_role(const std::string& role) const;

private:
    const RunConfig& config_;
    std::map<std::string, Gateway> cache_;
};

std::shared_ptr<Backend> make_backend(const std::string& name, const BackendSpec& spec);

}  // namespace pforge
