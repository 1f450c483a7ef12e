// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "pforge/assess.hpp"

namespace pforge {

// JSON API over AssessService:
//   POST /sessions
//   GET  /sessions/{id}/participants/{pid}/next
//   POST /sessions/{id}/participants/{pid}/judgments
//   GET  /sessions/{id}/results
// plus an optional static mount at / for the browser bundle.
class AssessServer {
public:
    explicit AssessServer(AssessService& service, std::filesystem::path static_dir = {});
    ~AssessServer();
    AssessServer(const AssessServer&) = delete;
    AssessServer& operator=(const AssessServer&) = delete;

    // Returns the bound port (useful with port 0). Throws Error(Io) when the port is taken.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void run();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// HTTP status for an error code: 400, 404 or 409 (500 for anything unexpected).
int http_status_for(ErrorCode code);

}  // namespace pforge
