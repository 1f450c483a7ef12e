// SPDX-License-Identifier: Apache-2.0
#include "pforge/gateway.hpp"

#include <algorithm>
#include <thread>

#include "pforge/text.hpp"

namespace pforge {

const char* to_string(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::System;
    if (s == "user") return Role::User;
    if (s == "assistant") return Role::Assistant;
    throw Error(ErrorCode::Validation, "unknown chat role '" + std::string(s) + "'");
}

const char* to_string(CallOutcome o) {
    switch (o) {
        case CallOutcome::Ok: return "ok";
        case CallOutcome::Retried: return "retried";
        case CallOutcome::Failed: return "failed";
    }
    return "failed";
}

void ChatRequest::validate() const {
    if (messages.empty()) throw Error(ErrorCode::Validation, "chat request has no messages");
    if (temperature < 0.0) throw Error(ErrorCode::Validation, "temperature must be >= 0");
    if (max_tokens <= 0) throw Error(ErrorCode::Validation, "max_tokens must be positive");
    bool seen_non_system = false;
    for (const auto& m : messages) {
        if (m.role != Role::System && !seen_non_system) {
            if (m.role != Role::User) throw Error(ErrorCode::Validation, "first non-system message must be from user");
            seen_non_system = true;
        }
        if (m.role != Role::System && text::is_blank(m.content)) {
            throw Error(ErrorCode::Validation, std::string(to_string(m.role)) + " message content is empty");
        }
    }
    if (!seen_non_system) throw Error(ErrorCode::Validation, "chat request has no user message");
}

nlohmann::json ChatRequest::wire_json() const {
    nlohmann::json body;
    body["model"] = model;
    auto& msgs = body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    body["temperature"] = temperature;
    body["max_tokens"] = max_tokens;
    if (seed) body["seed"] = *seed;
    return body;
}

std::string ChatRequest::digest() const { return text::sha256_hex(wire_json().dump()); }

const ChatMessage* ChatRequest::last_user_message() const {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::User) return &*it;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------

void CallLedger::append(LedgerEntry entry) {
    std::lock_guard lock(mutex_);
    entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> CallLedger::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t CallLedger::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::size_t CallLedger::count(std::string_view purpose_tag) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                  [&](const LedgerEntry& e) { return e.purpose_tag == purpose_tag; }));
}

std::vector<std::string> CallLedger::tags() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.purpose_tag);
    return out;
}

// ---------------------------------------------------------------------------

RateLimiter::RateLimiter(double requests_per_minute)
    : rate_per_minute_(requests_per_minute),
      capacity_(1.0),
      tokens_(1.0),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
    if (rate_per_minute_ <= 0.0) return;
    const double per_second = rate_per_minute_ / 60.0;
    std::unique_lock lock(mutex_);
    while (true) {
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(capacity_, tokens_ + elapsed * per_second);
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const double wait_s = (1.0 - tokens_) / per_second;
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
        lock.lock();
    }
}

// ---------------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      limiter_(std::make_shared<RateLimiter>(options_.requests_per_minute)),
      ledger_(std::make_shared<CallLedger>()),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
    if (!backend_) throw Error(ErrorCode::Validation, "gateway requires a backend");
}

Gateway Gateway::fork() const {
    Gateway g(*this);
    g.ledger_ = std::make_shared<CallLedger>();
    return g;
}

ChatRequest Gateway::make_request(std::vector<ChatMessage> messages, double temperature) const {
    ChatRequest r;
    r.model = options_.model;
    r.messages = std::move(messages);
    r.temperature = temperature;
    r.max_tokens = options_.max_tokens;
    r.seed = options_.seed;
    return r;
}

std::string Gateway::complete(const ChatRequest& request, std::string_view purpose_tag) {
    request.validate();
    if (options_.max_calls && ledger_->size() >= *options_.max_calls) {
        throw Error(ErrorCode::BudgetExceeded,
                    "call budget of " + std::to_string(*options_.max_calls) + " exhausted before '" +
                        std::string(purpose_tag) + "'");
    }
    const std::string digest = request.digest();
    const auto start = std::chrono::steady_clock::now();
    int attempts = 0;
    int last_status = 0;
    std::string last_text;

    auto record = [&](CallOutcome outcome) {
        ledger_->append(LedgerEntry{
            std::string(purpose_tag), digest,
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start), outcome,
            attempts});
    };

    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) sleeper_(options_.backoff_base * (1 << (attempt - 1)));
        limiter_->acquire();
        ++attempts;
        BackendReply reply;
        try {
            reply = backend_->send(request, purpose_tag);
        } catch (...) {
            record(CallOutcome::Failed);
            throw;
        }
        if (reply.status >= 200 && reply.status < 300) {
            record(attempts > 1 ? CallOutcome::Retried : CallOutcome::Ok);
            return std::move(reply.text);
        }
        last_status = reply.status;
        last_text = std::move(reply.text);
        const bool transient = reply.status == 0 || reply.status == 429 || reply.status >= 500;
        if (!transient) {
            record(CallOutcome::Failed);
            throw BackendRefusal(reply.status, last_text);
        }
    }
    record(CallOutcome::Failed);
    throw TransportError("'" + std::string(purpose_tag) + "' failed after " + std::to_string(attempts) +
                             " attempts (last status " + std::to_string(last_status) + "): " + last_text,
                         last_status);
}

}  // namespace pforge
