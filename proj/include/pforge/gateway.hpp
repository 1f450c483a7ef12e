// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pforge/schema.hpp"

namespace pforge {

enum class Role { System, User, Assistant };

const char* to_string(Role r);
Role role_from_string(std::string_view s);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    int max_tokens = 2048;
    std::optional<std::int64_t> seed;

    // Throws Error(Validation) when the request is not sendable.
    void validate() const;
    // OpenAI-compatible chat-completions body.
    nlohmann::json wire_json() const;
    // SHA-256 over the wire body; keys the scripted mock's fixtures.
    std::string digest() const;
    const ChatMessage* last_user_message() const;
};

enum class CallOutcome { Ok, Retried, Failed };

const char* to_string(CallOutcome o);

struct LedgerEntry {
    std::string purpose_tag;
    std::string request_digest;
    std::chrono::microseconds latency{0};
    CallOutcome outcome = CallOutcome::Ok;
    int attempts = 1;
};

// Append-only record of gateway calls. Appends are atomic.
class CallLedger {
public:
    void append(LedgerEntry entry);
    std::vector<LedgerEntry> entries() const;
    std::size_t size() const;
    std::size_t count(std::string_view purpose_tag) const;
    std::vector<std::string> tags() const;

private:
    mutable std::mutex mutex_;
    std::vector<LedgerEntry> entries_;
};

// What a backend produced for one attempt. status 0 means the transport failed
// before any HTTP status was seen.
struct BackendReply {
    int status = 200;
    std::string text;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendReply send(const ChatRequest& request, std::string_view purpose_tag) = 0;
    virtual std::string label() const = 0;
};

// Token bucket measured in requests per minute; 0 disables limiting.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_minute);
    void acquire();
    double requests_per_minute() const { return rate_per_minute_; }

private:
    std::mutex mutex_;
    double rate_per_minute_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct GatewayOptions {
    std::string model = "default";
    int max_retries = 2;
    std::chrono::milliseconds backoff_base{500};
    double requests_per_minute = 0.0;
    std::optional<std::size_t> max_calls;  // per ledger
    double generation_temperature = 0.7;
    double judge_temperature = 0.0;
    int max_tokens = 2048;
    std::optional<std::int64_t> seed;
};

// Uniform chat-completion access. Copies share backend, limiter and ledger;
// fork() shares backend and limiter but starts a fresh ledger.
class Gateway {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {});

    std::string complete(const ChatRequest& request, std::string_view purpose_tag);

    ChatRequest make_request(std::vector<ChatMessage> messages, double temperature) const;

    Gateway fork() const;
    const CallLedger& ledger() const { return *ledger_; }
    const GatewayOptions& options() const { return options_; }
    const Backend& backend() const { return *backend_; }
    void set_sleeper(Sleeper s) { sleeper_ = std::move(s); }

private:
    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::shared_ptr<RateLimiter> limiter_;
    std::shared_ptr<CallLedger> ledger_;
    Sleeper sleeper_;
};

// ---------------------------------------------------------------------------
// Backends

struct HttpBackendConfig {
    std::string base_url;  // e.g. https://api.openai.com/v1
    std::string api_key;
    std::chrono::seconds timeout{120};
};

// OpenAI-compatible POST {base_url}/chat/completions.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    BackendReply send(const ChatRequest& request, std::string_view purpose_tag) override;
    std::string label() const override { return "http:" + config_.base_url; }

private:
    HttpBackendConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

// Deterministic offline backend synthesizing schema-valid payloads per purpose.
class TemplateMockBackend final : public Backend {
public:
    BackendReply send(const ChatRequest& request, std::string_view purpose_tag) override;
    std::string label() const override { return "template-mock"; }
};

// Purposes the template mock understands.
bool is_template_mock_purpose(std::string_view purpose_tag);

// Throws Error(UnknownPurpose) for tags outside the supported set.
std::string template_mock_complete(const ChatRequest& request, std::string_view purpose_tag);

// Replays fixtures. Lookup order: exact request digest, then a per-purpose queue.
// A queue that runs dry keeps repeating its final reply.
class ScriptedMockBackend final : public Backend {
public:
    ScriptedMockBackend() = default;

    // Fixture file: {"by_digest": {digest: reply|[reply...]}, "by_purpose": {tag: [reply...]}}
    // where reply is a string or {"status": int, "text": string}.
    static std::shared_ptr<ScriptedMockBackend> from_file(const std::string& path);
    static std::shared_ptr<ScriptedMockBackend> from_json(const nlohmann::json& fixtures);

    void add_digest(std::string digest, BackendReply reply);
    void push_purpose(std::string purpose_tag, BackendReply reply);
    void push_purpose(std::string purpose_tag, std::string text) {
        push_purpose(std::move(purpose_tag), BackendReply{200, std::move(text)});
    }

    BackendReply send(const ChatRequest& request, std::string_view purpose_tag) override;
    std::string label() const override { return "scripted-mock"; }

    // Requests seen so far, in order, with their purpose tags.
    std::vector<std::pair<std::string, ChatRequest>> seen() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::deque<BackendReply>> by_digest_;
    std::map<std::string, std::deque<BackendReply>, std::less<>> by_purpose_;
    std::vector<std::pair<std::string, ChatRequest>> seen_;
};

}  // namespace pforge
