// SPDX-License-Identifier: Apache-2.0
#include <fstream>

#include "pforge/gateway.hpp"

namespace pforge {

namespace {

BackendReply reply_from_json(const nlohmann::json& j) {
    if (j.is_string()) return BackendReply{200, j.get<std::string>()};
    if (j.is_object()) {
        return BackendReply{j.value("status", 200), j.value("text", std::string{})};
    }
    throw Error(ErrorCode::Config, "fixture reply must be a string or {status, text} object");
}

void load_replies(const nlohmann::json& j, std::deque<BackendReply>& out) {
    if (j.is_array()) {
        for (const auto& r : j) out.push_back(reply_from_json(r));
    } else {
        out.push_back(reply_from_json(j));
    }
}

BackendReply take(std::deque<BackendReply>& queue) {
    BackendReply r = queue.front();
    if (queue.size() > 1) queue.pop_front();
    return r;
}

}  // namespace

std::shared_ptr<ScriptedMockBackend> ScriptedMockBackend::from_json(const nlohmann::json& fixtures) {
    auto mock = std::make_shared<ScriptedMockBackend>();
    if (!fixtures.is_object()) throw Error(ErrorCode::Config, "fixture document must be an object");
    for (auto it = fixtures.begin(); it != fixtures.end(); ++it) {
        if (it.key() != "by_digest" && it.key() != "by_purpose") {
            throw ConfigError("fixtures." + it.key(), "unknown key");
        }
    }
    if (auto it = fixtures.find("by_digest"); it != fixtures.end()) {
        for (auto e = it->begin(); e != it->end(); ++e) load_replies(e.value(), mock->by_digest_[e.key()]);
    }
    if (auto it = fixtures.find("by_purpose"); it != fixtures.end()) {
        for (auto e = it->begin(); e != it->end(); ++e) load_replies(e.value(), mock->by_purpose_[e.key()]);
    }
    return mock;
}

std::shared_ptr<ScriptedMockBackend> ScriptedMockBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open fixture file " + path);
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path, std::string("invalid fixture JSON: ") + e.what());
    }
}

void ScriptedMockBackend::add_digest(std::string digest, BackendReply reply) {
    std::lock_guard lock(mutex_);
    by_digest_[std::move(digest)].push_back(std::move(reply));
}

void ScriptedMockBackend::push_purpose(std::string purpose_tag, BackendReply reply) {
    std::lock_guard lock(mutex_);
    by_purpose_[std::move(purpose_tag)].push_back(std::move(reply));
}

BackendReply ScriptedMockBackend::send(const ChatRequest& request, std::string_view purpose_tag) {
    const std::string digest = request.digest();
    std::lock_guard lock(mutex_);
    seen_.emplace_back(std::string(purpose_tag), request);
    if (auto it = by_digest_.find(digest); it != by_digest_.end() && !it->second.empty()) return take(it->second);
    if (auto it = by_purpose_.find(purpose_tag); it != by_purpose_.end() && !it->second.empty()) {
        return take(it->second);
    }
    return BackendReply{404, "no fixture for digest " + digest + " (purpose " + std::string(purpose_tag) + ")"};
}

std::vector<std::pair<std::string, ChatRequest>> ScriptedMockBackend::seen() const {
    std::lock_guard lock(mutex_);
    return seen_;
}

}  // namespace pforge
