// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "httplib.h"
#include "pforge/gateway.hpp"

using namespace pforge;
using namespace std::chrono_literals;

namespace {

ChatRequest request_for(Gateway& g, const std::string& text) {
    return g.make_request({ChatMessage{Role::User, text}}, 0.0);
}

// Backend returning a fixed status sequence, then 200.
class SequenceBackend final : public Backend {
public:
    explicit SequenceBackend(std::vector<int> statuses) : statuses_(std::move(statuses)) {}
    BackendReply send(const ChatRequest&, std::string_view) override {
        const int s = calls_ < statuses_.size() ? statuses_[calls_] : 200;
        ++calls_;
        return {s, s == 200 ? "ok" : "err"};
    }
    std::string label() const override { return "sequence"; }
    std::size_t calls_ = 0;

private:
    std::vector<int> statuses_;
};

}  // namespace

TEST_SUITE("gateway") {

TEST_CASE("request digest is stable and content-sensitive") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    const auto a = request_for(g, "hello");
    CHECK(a.digest() == request_for(g, "hello").digest());
    CHECK(a.digest() != request_for(g, "hello!").digest());
    CHECK(a.digest().size() == 64);
}

TEST_CASE("transient statuses retry with exponential backoff") {
    auto backend = std::make_shared<SequenceBackend>(std::vector<int>{503, 429});
    Gateway g(backend);
    std::vector<std::chrono::milliseconds> sleeps;
    g.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    CHECK(g.complete(request_for(g, "x"), "turn2") == "ok");
    CHECK(backend->calls_ == 3);
    CHECK(sleeps == std::vector<std::chrono::milliseconds>{500ms, 1000ms});
    REQUIRE(g.ledger().size() == 1);
    CHECK(g.ledger().entries()[0].outcome == CallOutcome::Retried);
    CHECK(g.ledger().entries()[0].attempts == 3);
}

TEST_CASE("retries run out into a transport error with one ledger entry") {
    auto backend = std::make_shared<SequenceBackend>(std::vector<int>{500, 502, 504, 500});
    Gateway g(backend, testutil::fast_options());
    g.set_sleeper([](auto) {});
    try {
        g.complete(request_for(g, "x"), "judge");
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.last_status() == 504);
    }
    CHECK(backend->calls_ == 3);
    REQUIRE(g.ledger().size() == 1);
    CHECK(g.ledger().entries()[0].outcome == CallOutcome::Failed);
}

TEST_CASE("client errors are not retried") {
    auto backend = std::make_shared<SequenceBackend>(std::vector<int>{401});
    Gateway g(backend);
    g.set_sleeper([](auto) { FAIL("no sleep expected"); });
    CHECK_THROWS_AS(g.complete(request_for(g, "x"), "turn2"), BackendRefusal);
    CHECK(backend->calls_ == 1);
    CHECK(g.ledger().size() == 1);
}

TEST_CASE("call budget is enforced before sending") {
    GatewayOptions o;
    o.max_calls = 2;
    Gateway g(std::make_shared<TemplateMockBackend>(), o);
    g.complete(request_for(g, "a"), "respond");
    g.complete(request_for(g, "b"), "respond");
    CHECK_THROWS_AS(g.complete(request_for(g, "c"), "respond"), Error);
    CHECK(g.ledger().size() == 2);
    Gateway fresh = g.fork();
    CHECK(fresh.ledger().size() == 0);
    CHECK_NOTHROW(fresh.complete(request_for(fresh, "c"), "respond"));
}

TEST_CASE("copies share the ledger, forks do not") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    Gateway copy = g;
    copy.complete(request_for(copy, "a"), "respond");
    CHECK(g.ledger().size() == 1);
    Gateway forked = g.fork();
    forked.complete(request_for(forked, "a"), "respond");
    CHECK(g.ledger().size() == 1);
    CHECK(forked.ledger().size() == 1);
}

TEST_CASE("invalid requests are rejected") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    ChatRequest r;
    CHECK_THROWS_AS(g.complete(r, "turn2"), Error);
    CHECK(g.ledger().size() == 0);
}

TEST_CASE("template mock is deterministic and knows its purposes") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    const auto r = request_for(g, "<intent>\nPlan a weekend in Lisbon\n</intent>");
    const auto first = g.complete(r, "turn2");
    CHECK(first == g.complete(r, "turn2"));
    CHECK_NOTHROW(validate_intent_analysis(first));
    CHECK_THROWS_AS(g.complete(r, "poetry"), Error);
    CHECK(g.ledger().size() == 3);
    CHECK(g.ledger().entries()[2].outcome == CallOutcome::Failed);
}

TEST_CASE("template mock judge scores stay in range and differ across seeds") {
    std::set<std::string> replies;
    for (int seed = 0; seed < 20; ++seed) {
        ChatRequest r;
        r.model = "m";
        r.messages = {{Role::User, "compare"}};
        r.seed = seed;
        const auto reply = template_mock_complete(r, "judge");
        const auto j = parse_payload(reply);
        for (const char* k : {"align_a", "quality_a", "align_b", "quality_b"}) {
            CHECK(score_in_range(j[k].get<int>()));
        }
        replies.insert(reply);
    }
    CHECK(replies.size() > 1);
}

TEST_CASE("scripted mock replays digests before purpose queues") {
    auto b = std::make_shared<ScriptedMockBackend>();
    Gateway g(b);
    const auto special = request_for(g, "special");
    b->add_digest(special.digest(), {200, "by digest"});
    b->push_purpose("turn2", "first");
    b->push_purpose("turn2", "second");
    CHECK(g.complete(special, "turn2") == "by digest");
    CHECK(g.complete(request_for(g, "other"), "turn2") == "first");
    CHECK(g.complete(request_for(g, "other"), "turn2") == "second");
    CHECK(g.complete(request_for(g, "other"), "turn2") == "second");
    CHECK_THROWS_AS(g.complete(request_for(g, "other"), "turn3"), BackendRefusal);
    CHECK(b->seen().size() == 5);
}

TEST_CASE("scripted mock fixtures from json") {
    const auto b = ScriptedMockBackend::from_json(Json::parse(
        R"({"by_purpose": {"judge": [{"status": 503, "text": "busy"}, "{\"align_a\": 5}"]}})"));
    Gateway g(b, testutil::fast_options());
    g.set_sleeper([](auto) {});
    CHECK(g.complete(request_for(g, "x"), "judge") == "{\"align_a\": 5}");
    CHECK(g.ledger().entries()[0].attempts == 2);
}

TEST_CASE("http backend speaks the chat-completions protocol and retries 5xx") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string seen_auth;
    Json seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (hits++ == 0) {
            res.status = 503;
            res.set_content("overloaded", "text/plain");
            return;
        }
        seen_auth = req.get_header_value("Authorization");
        seen_body = Json::parse(req.body);
        res.set_content(R"({"choices": [{"message": {"role": "assistant", "content": "pong"}}]})", "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    GatewayOptions o = testutil::fast_options();
    o.model = "test-model";
    Gateway g(std::make_shared<HttpBackend>(
                  HttpBackendConfig{"http://127.0.0.1:" + std::to_string(port) + "/v1", "sekret", std::chrono::seconds(5)}),
              o);
    g.set_sleeper([](auto) {});
    const auto reply = g.complete(request_for(g, "ping"), "respond");
    server.stop();
    t.join();

    CHECK(reply == "pong");
    CHECK(hits == 2);
    CHECK(seen_auth == "Bearer sekret");
    CHECK(seen_body["model"] == "test-model");
    CHECK(seen_body["messages"][0]["role"] == "user");
    CHECK(seen_body["messages"][0]["content"] == "ping");
    CHECK(g.ledger().entries()[0].outcome == CallOutcome::Retried);
}

TEST_CASE("http backend reports an unreachable host as status 0") {
    HttpBackend backend(HttpBackendConfig{"http://127.0.0.1:1", "", std::chrono::seconds(1)});
    ChatRequest r;
    r.model = "m";
    r.messages = {{Role::User, "x"}};
    CHECK(backend.send(r, "respond").status == 0);
}

TEST_CASE("rate limiter spaces calls") {
    RateLimiter limiter(600.0);  // one every 100 ms
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 3; ++i) limiter.acquire();
    CHECK(std::chrono::steady_clock::now() - start >= 180ms);
}

}  // TEST_SUITE
