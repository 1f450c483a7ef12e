// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "pforge/gateway.hpp"
#include "pforge/schema.hpp"
#include "pforge/text.hpp"

namespace testutil {

inline std::filesystem::path data_path(const std::string& rel) { return std::filesystem::path(PFORGE_TEST_DATA) / rel; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing test file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string sample(const std::string& name) { return read_file(data_path("financial_report/" + name)); }

inline pforge::UserRequest sample_request() {
    pforge::UserRequest r;
    r.intent_text = sample("intent.txt");
    return r;
}

// Scripted backend replaying the financial-report turns, one per purpose.
inline std::shared_ptr<pforge::ScriptedMockBackend> sample_backend() {
    auto b = std::make_shared<pforge::ScriptedMockBackend>();
    b->push_purpose("turn2", sample("turn2.json"));
    b->push_purpose("turn3", sample("turn3.json"));
    b->push_purpose("turn4", sample("turn4.json"));
    return b;
}

inline pforge::GatewayOptions fast_options() {
    pforge::GatewayOptions o;
    o.backoff_base = std::chrono::milliseconds(0);
    return o;
}

// Judge stand-in: a response containing GOOD scores 9, BAD scores 3, anything else 5.
// Scores follow the response text, so presentation order must not matter.
class MarkerJudgeBackend final : public pforge::Backend {
public:
    pforge::BackendReply send(const pforge::ChatRequest& request, std::string_view) override {
        const std::string& user = request.messages.at(1).content;
        auto section = [&](const std::string& tag) {
            const auto open = user.find("<" + tag + ">");
            const auto close = user.find("</" + tag + ">");
            return user.substr(open, close - open);
        };
        auto score = [](const std::string& text) {
            if (text.find("GOOD") != std::string::npos) return 9;
            if (text.find("BAD") != std::string::npos) return 3;
            return 5;
        };
        const int a = score(section("response_a"));
        const int b = score(section("response_b"));
        pforge::Json j{{"align_a", a}, {"quality_a", a}, {"align_b", b}, {"quality_b", b}, {"rationale", "marker"}};
        ++calls;
        return {200, j.dump()};
    }
    std::string label() const override { return "marker-judge"; }
    std::atomic<int> calls{0};
};

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::path(PFORGE_TEST_SCRATCH) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testutil
