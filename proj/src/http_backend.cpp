// SPDX-License-Identifier: Apache-2.0
#include "httplib.h"
#include "pforge/gateway.hpp"

namespace pforge {

namespace {

// Splits "https://host:port/v1" into ("https://host:port", "/v1").
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::Config, "endpoint URL lacks a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    std::tie(scheme_host_port_, path_prefix_) = split_url(config_.base_url);
}

BackendReply HttpBackend::send(const ChatRequest& request, std::string_view /*purpose_tag*/) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = client.Post(path_prefix_ + "/chat/completions", headers, request.wire_json().dump(),
                           "application/json");
    if (!res) return BackendReply{0, "transport error: " + httplib::to_string(res.error())};
    if (res->status < 200 || res->status >= 300) return BackendReply{res->status, res->body};

    try {
        const auto body = nlohmann::json::parse(res->body);
        const auto& content = body.at("choices").at(0).at("message").at("content");
        return BackendReply{res->status, content.get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        // Surfaced as a bad gateway so the retry policy applies.
        return BackendReply{502, std::string("malformed completion body: ") + e.what()};
    }
}

}  // namespace pforge
