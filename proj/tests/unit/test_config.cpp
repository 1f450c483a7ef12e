// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "helpers.hpp"
#include "pforge/config.hpp"
#include "pforge/errors.hpp"

using namespace pforge;

namespace {

RunConfig::EnvLookup fake_env(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const std::string& k) -> std::optional<std::string> {
        auto it = vars.find(k);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

std::string config_error_path(const Json& j, const RunConfig::EnvLookup& env = fake_env({})) {
    try {
        RunConfig::from_json(j, env).validate();
    } catch (const ConfigError& e) {
        return e.field_path();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("a full configuration parses") {
    const auto j = Json::parse(R"({
        "backends": {
            "local": {"kind": "http", "url": "http://localhost:8000/v1", "model": "llama", "api_key_env": "LOCAL_KEY",
                      "requests_per_minute": 60},
            "mock": {"kind": "template-mock"}
        },
        "roles": {"refiner": "local", "judge": "mock", "target": "mock", "prompter_a": "mock", "prompter_b": "local"},
        "seed": 9,
        "temperatures": {"generation": 0.5, "judge": 0.1},
        "budget": {"max_calls": 100},
        "judge": {"base_trials": 3},
        "dataset": {"per_domain_target": 10, "per_domain_test": 2, "teacher_plan": {"local": 2, "mock": 1}},
        "training": {"epochs": 3},
        "serve": {"port": 9000},
        "paths": {"output": "${OUT_DIR}/run"}
    })");
    const auto c = RunConfig::from_json(j, fake_env({{"LOCAL_KEY", "k-123"}, {"OUT_DIR", "/tmp/x"}}));
    CHECK_NOTHROW(c.validate());
    CHECK(c.backends.at("local").kind == BackendKind::Http);
    CHECK(c.backends.at("local").api_key == "k-123");
    CHECK(c.seed == 9);
    CHECK(c.dataset.seed == 9);
    CHECK(c.judge.base_trials == 3);
    CHECK(c.max_calls == std::optional<std::size_t>(100));
    CHECK(c.training.epochs == 3);
    CHECK(c.serve.port == 9000);
    CHECK(c.output_dir == "/tmp/x/run");
}

TEST_CASE("errors name the offending field") {
    CHECK(config_error_path(Json{{"bogus", 1}}) == "bogus");
    CHECK(config_error_path(Json{{"judge", {{"trials", 5}}}}) == "judge.trials");
    CHECK(config_error_path(Json{{"seed", "many"}}) == "seed");
    CHECK(config_error_path(Json{{"backends", {{"x", {{"kind", "telepathy"}}}}}}) == "backends.x.kind");
    CHECK(config_error_path(Json{{"paths", {{"output", "${NOPE}"}}}}) == "paths.output");
    CHECK(config_error_path(Json{{"training", {{"learning_rate", 1}}}}) == "training.learning_rate");
}

TEST_CASE("roles must point at configured backends") {
    auto c = RunConfig::mock_defaults();
    CHECK_NOTHROW(c.validate());
    c.roles["judge"] = "missing";
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("gateway factory binds roles and forks ledgers") {
    auto c = RunConfig::mock_defaults();
    c.roles.erase("judge");
    GatewayFactory f(c);
    CHECK(f.has_role("refiner"));
    CHECK_FALSE(f.has_role("judge"));
    try {
        f.role("judge");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field_path() == "roles.judge");
    }
    auto a = f.role("refiner");
    auto b = f.role("refiner");
    a.complete(a.make_request({{Role::User, "x"}}, 0.0), "respond");
    CHECK(b.ledger().size() == 0);
}

TEST_CASE("http backends need a key") {
    BackendSpec s;
    s.kind = BackendKind::Http;
    s.url = "http://localhost:1/v1";
    CHECK_THROWS_AS(make_backend("remote", s), ConfigError);
    s.api_key = "k";
    CHECK(make_backend("remote", s) != nullptr);
}

TEST_CASE("config files load from disk") {
    const auto dir = testutil::scratch("config_file");
    std::ofstream(dir / "run.json") << R"({"seed": 5, "evoke": {"rounds": 2}})";
    const auto c = RunConfig::from_file(dir / "run.json", fake_env({}));
    CHECK(c.seed == 5);
    CHECK(c.evoke_rounds == 2);
    CHECK_THROWS_AS(RunConfig::from_file(dir / "missing.json"), Error);
}

}  // TEST_SUITE
