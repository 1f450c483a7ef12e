// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "helpers.hpp"
#include "pforge/pipeline.hpp"

using namespace pforge;
using testutil::sample;

namespace {

std::vector<std::string> ledger_tags(const Gateway& g) {
    std::vector<std::string> out;
    for (const auto& e : g.ledger().entries()) out.push_back(e.purpose_tag);
    return out;
}

std::string all_text(const ChatRequest& r) {
    std::string out;
    for (const auto& m : r.messages) out += m.content + "\n";
    return out;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("financial report replay finishes in three calls") {
    Gateway g(testutil::sample_backend());
    RefinePipeline p(g, TemplateSet::defaults());
    const auto r = p.run(testutil::sample_request());
    CHECK(r.final.optimized_prompt.rfind("You are a **seasoned Financial Analyst", 0) == 0);
    CHECK(r.calls_used == 3);
    CHECK(r.parse_retries == 0);
    CHECK(ledger_tags(g) == std::vector<std::string>{"turn2", "turn3", "turn4"});
}

TEST_CASE("template mock run uses three calls and validates") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    RefinePipeline p(g, TemplateSet::defaults());
    const auto r = p.run(UserRequest{"Plan a three-day trip to Kyoto", {"travels by train"}, std::nullopt, std::nullopt});
    CHECK(r.calls_used == 3);
    CHECK(g.ledger().size() == 3);
    CHECK(r.report.optimization_suggestions.size() == 5);
}

TEST_CASE("turn requests carry the curated context and nothing raw") {
    auto backend = std::make_shared<ScriptedMockBackend>();
    Json turn2 = Json::parse(sample("turn2.json"));
    turn2["scratchpad"] = "EXTRA-KEY-SENTINEL";
    backend->push_purpose("turn2", "Thinking... RAW-PROSE-SENTINEL\n```json\n" + turn2.dump(2) + "\n```\n");
    backend->push_purpose("turn3", sample("turn3.json"));
    backend->push_purpose("turn4", sample("turn4.json"));
    Gateway g(backend);
    RefinePipeline p(g, TemplateSet::defaults());
    const auto r = p.run(testutil::sample_request());
    CHECK(r.analysis.extra["scratchpad"] == "EXTRA-KEY-SENTINEL");

    const auto seen = backend->seen();
    REQUIRE(seen.size() == 3);
    for (std::size_t i = 1; i < 3; ++i) {
        const auto text = all_text(seen[i].second);
        CHECK(text.find("RAW-PROSE-SENTINEL") == std::string::npos);
        CHECK(text.find("EXTRA-KEY-SENTINEL") == std::string::npos);
        CHECK(text.find("Purpose: " + r.analysis.purpose) != std::string::npos);
        CHECK(text.find("[sources: intent-derived]") != std::string::npos);
    }
    const auto turn3_text = all_text(seen[1].second);
    const auto turn4_text = all_text(seen[2].second);
    CHECK(turn3_text.find("Suggestions:") == std::string::npos);
    CHECK(turn4_text.find("Suggestions:\n1. ") != std::string::npos);
    CHECK(turn4_text.find("Optimized capabilities:") != std::string::npos);
}

TEST_CASE("a malformed turn is re-asked with the validation error") {
    auto backend = std::make_shared<ScriptedMockBackend>();
    Json four = Json::parse(sample("turn3.json"));
    four["optimization_suggestions"].erase(4);
    backend->push_purpose("turn2", sample("turn2.json"));
    backend->push_purpose("turn3", four.dump());
    backend->push_purpose("turn3", sample("turn3.json"));
    backend->push_purpose("turn4", sample("turn4.json"));
    Gateway g(backend);
    RefinePipeline p(g, TemplateSet::defaults());
    const auto r = p.run(testutil::sample_request());
    CHECK(r.calls_used == 4);
    CHECK(r.parse_retries == 1);
    const auto reask = backend->seen()[2].second;
    REQUIRE(reask.messages.size() == 4);
    CHECK(reask.messages[2].role == Role::Assistant);
    CHECK(reask.messages[3].content.find("expected 5, got 4") != std::string::npos);
}

TEST_CASE("a turn that never parses raises TurnParseError") {
    auto backend = std::make_shared<ScriptedMockBackend>();
    backend->push_purpose("turn2", "I cannot produce JSON today.");
    Gateway g(backend);
    PipelineOptions o;
    o.max_parse_retries = 2;
    RefinePipeline p(g, TemplateSet::defaults(), o);
    try {
        p.run(testutil::sample_request());
        FAIL("expected TurnParseError");
    } catch (const TurnParseError& e) {
        CHECK(e.code() == ErrorCode::TurnParse);
    }
    CHECK(g.ledger().size() == 3);
}

TEST_CASE("finalizing before suggestions exist is refused") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    RefinePipeline p(g, TemplateSet::defaults());
    const auto ctx = curate(validate_intent_analysis(sample("turn2.json")), {});
    CHECK_THROWS_AS(p.turn_finalize(ctx), Error);
    CHECK(g.ledger().size() == 0);
}

TEST_CASE("gateway failures propagate without partial results") {
    auto backend = std::make_shared<ScriptedMockBackend>();
    backend->push_purpose("turn2", sample("turn2.json"));
    backend->push_purpose("turn3", BackendReply{400, "bad request"});
    Gateway g(backend);
    RefinePipeline p(g, TemplateSet::defaults());
    CHECK_THROWS_AS(p.run(testutil::sample_request()), BackendRefusal);
}

TEST_CASE("stored preferences feed turn 2 and the curated context") {
    PreferenceStore store;
    store.add("ana", RecordKind::Preference, "wants figures in quarterly tables");
    store.add("ana", RecordKind::CapabilityNote, "quarterly variance analysis");
    auto backend = testutil::sample_backend();
    Gateway g(backend);
    PipelineOptions o;
    o.use_preference_store = true;
    RefinePipeline p(g, TemplateSet::defaults(), o, &store);
    auto req = testutil::sample_request();
    req.user_id = "ana";
    const auto r = p.run(req);
    CHECK(r.calls_used == 3);
    REQUIRE(r.retrieved.size() == 2);
    const auto seen = backend->seen();
    CHECK(all_text(seen[0].second).find("- wants figures in quarterly tables") != std::string::npos);
    const auto turn3 = all_text(seen[1].second);
    CHECK(turn3.find("Known user preferences: wants figures in quarterly tables") != std::string::npos);
    CHECK(turn3.find("- quarterly variance analysis [sources: retrieved]") != std::string::npos);
}

TEST_CASE("preferences stay out unless enabled") {
    PreferenceStore store;
    store.add("ana", RecordKind::Preference, "wants figures in quarterly tables");
    auto backend = testutil::sample_backend();
    Gateway g(backend);
    RefinePipeline p(g, TemplateSet::defaults(), {}, &store);
    auto req = testutil::sample_request();
    req.user_id = "ana";
    const auto r = p.run(req);
    CHECK(r.retrieved.empty());
    CHECK(all_text(backend->seen()[0].second).find("quarterly tables") == std::string::npos);
}

TEST_CASE("template overrides replace assets by name") {
    const auto dir = testutil::scratch("template_override");
    std::filesystem::create_directories(dir / "templates");
    std::ofstream(dir / "templates" / "cot_directive.txt") << "Reason carefully.";
    const auto set = TemplateSet::with_overrides(dir);
    CHECK(set.get("templates/cot_directive.txt") == "Reason carefully.");
    CHECK(set.get("templates/turn2_user.txt") == TemplateSet::defaults().get("templates/turn2_user.txt"));
    CHECK_THROWS_AS(render_template("Hi {name}", {}), Error);
    CHECK(render_template("Hi {name}, {\"k\": 1}", {{"name", "Bo"}}) == "Hi Bo, {\"k\": 1}");
}

}  // TEST_SUITE
