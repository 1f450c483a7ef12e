// SPDX-License-Identifier: Apache-2.0
#include "pforge/assess_http.hpp"

#include <sys/socket.h>

#include <atomic>

#include "httplib.h"

namespace pforge {

int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownParticipant: return 404;
        case ErrorCode::DuplicateJudgment: return 409;
        case ErrorCode::Validation:
        case ErrorCode::Schema:
        case ErrorCode::Cardinality:
        case ErrorCode::OutOfRangeScore: return 400;
        default: return 500;
    }
}

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, Json{{"error", code}, {"message", message}});
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        send_error(res, http_status_for(e.code()), error_code_name(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
    }
}

Json parse_body(const httplib::Request& req) {
    Json j = Json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::Validation, "request body must be a JSON object");
    return j;
}

int score_arg(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw Error(ErrorCode::Validation, std::string(key) + " must be an integer");
    }
    return j[key].get<int>();
}

const char* preferred_side(const HumanJudgment& h) {
    if (h.winner == Winner::Same) return "same";
    const bool a_won = h.winner == Winner::FirstBetter;
    const bool a_left = h.presented_order == PresentedOrder::AB;
    return a_won == a_left ? "left" : "right";
}

}  // namespace

struct AssessServer::Impl {
    AssessService& service;
    httplib::Server server;
    std::atomic<bool> bound{false};

    explicit Impl(AssessService& s) : service(s) {}
};

AssessServer::AssessServer(AssessService& service, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto& srv = impl_->server;
    auto& svc = impl_->service;

    // SO_REUSEADDR only, so a port already in use fails to bind.
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });

    srv.Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const Json body = parse_body(req);
            if (!body.contains("tasks") || !body["tasks"].is_array()) throw Error(ErrorCode::Validation, "tasks must be an array");
            if (!body.contains("participants") || !body["participants"].is_array()) {
                throw Error(ErrorCode::Validation, "participants must be an array");
            }
            std::vector<ComparisonTask> tasks;
            for (const auto& t : body["tasks"]) tasks.push_back(comparison_task_from_json(t));
            std::vector<std::string> participants;
            for (const auto& p : body["participants"]) participants.push_back(p.get<std::string>());
            const auto seed = body.value("seed", std::uint64_t{0});
            std::optional<std::string> id;
            if (body.contains("session_id")) id = body["session_id"].get<std::string>();
            const auto sid = svc.create_session(tasks, participants, seed, id);
            send_json(res, 201, Json{{"session_id", sid},
                                     {"seed", seed},
                                     {"assignments", tasks.size() * participants.size()}});
        });
    });

    srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/participants/([A-Za-z0-9_-]+)/next)",
            [&svc](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                    const auto pair = svc.next_pair(req.matches[1], req.matches[2]);
                    if (!pair) {
                        send_json(res, 200, Json{{"done", true}});
                        return;
                    }
                    send_json(res, 200,
                              Json{{"done", false},
                                   {"task_id", pair->task_id},
                                   {"request", pair->request_text},
                                   {"left", pair->left_text},
                                   {"right", pair->right_text},
                                   {"position", pair->position},
                                   {"total", pair->total}});
                });
            });

    srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/participants/([A-Za-z0-9_-]+)/judgments)",
             [&svc](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                     const Json body = parse_body(req);
                     if (!body.contains("task_id") || !body["task_id"].is_string()) {
                         throw Error(ErrorCode::Validation, "task_id must be a string");
                     }
                     const auto h = svc.submit_judgment(req.matches[1], req.matches[2], body["task_id"].get<std::string>(),
                                                        score_arg(body, "align_left"), score_arg(body, "quality_left"),
                                                        score_arg(body, "align_right"), score_arg(body, "quality_right"));
                     Json out = to_json(h);
                     out["preferred"] = preferred_side(h);
                     send_json(res, 201, out);
                 });
             });

    srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/results)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto r = svc.results(req.matches[1]);
            Json judgments = Json::array();
            for (const auto& h : r.judgments) judgments.push_back(to_json(h));
            send_json(res, 200,
                      Json{{"first_better", r.row.first_better},
                           {"second_better", r.row.second_better},
                           {"same", r.row.same},
                           {"total", r.row.judged()},
                           {"judgments", std::move(judgments)}});
        });
    });

    if (!static_dir.empty()) {
        if (!srv.set_mount_point("/", static_dir.string())) {
            throw Error(ErrorCode::Io, "static directory " + static_dir.string() + " does not exist");
        }
    }
}

AssessServer::~AssessServer() { stop(); }

int AssessServer::bind(const std::string& host, int port) {
    auto& srv = impl_->server;
    int bound = -1;
    if (port == 0) {
        bound = srv.bind_to_any_port(host);
    } else if (srv.bind_to_port(host, port)) {
        bound = port;
    }
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound;
}

void AssessServer::run() {
    if (!impl_->bound) throw Error(ErrorCode::Io, "server is not bound");
    impl_->server.listen_after_bind();
}

void AssessServer::stop() {
    if (impl_ && impl_->bound) impl_->server.stop();
}

bool AssessServer::running() const { return impl_->server.is_running(); }

}  // namespace pforge
