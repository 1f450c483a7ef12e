// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "helpers.hpp"
#include "pforge/domains.hpp"
#include "pforge/schema.hpp"

using namespace pforge;
using testutil::sample;

TEST_SUITE("schema") {

TEST_CASE("financial report turn 2 validates with both capability channels") {
    const auto a = validate_intent_analysis(sample("turn2.json"));
    CHECK(a.capability_information.explicit_inferred_capabilities.size() == 9);
    CHECK(a.capability_information.task_required_capabilities.size() == 6);
    CHECK(a.purpose.find("quarterly") != std::string::npos);
}

TEST_CASE("financial report turn 3 has five numbered suggestions") {
    const auto r = validate_optimization_report(sample("turn3.json"));
    REQUIRE(r.optimization_suggestions.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(r.optimization_suggestions[i].suggestion_number == i + 1);
}

TEST_CASE("financial report turn 4 opens with the analyst persona") {
    const auto p = validate_optimized_prompt(sample("turn4.json"));
    CHECK(p.optimized_prompt.rfind("You are a **seasoned Financial Analyst", 0) == 0);
}

TEST_CASE("serialization round-trips and keeps field order") {
    const auto a = validate_intent_analysis(sample("turn2.json"));
    CHECK(intent_analysis_from_json(to_json(a)) == a);
    CHECK(to_json(a).dump(4) == Json::parse(sample("turn2.json")).dump(4));
    const auto r = validate_optimization_report(sample("turn3.json"));
    CHECK(to_json(r).dump(4) == Json::parse(sample("turn3.json")).dump(4));
}

TEST_CASE("suggestion cardinality errors") {
    Json j = Json::parse(sample("turn3.json"));
    SUBCASE("four suggestions") {
        j["optimization_suggestions"].erase(4);
        try {
            validate_optimization_report(j.dump());
            FAIL("expected CardinalityError");
        } catch (const CardinalityError& e) {
            CHECK(std::string(e.what()) == "expected 5, got 4");
        }
    }
    SUBCASE("duplicate number") {
        j["optimization_suggestions"][3]["suggestion_number"] = 3;
        try {
            validate_optimization_report(j.dump());
            FAIL("expected CardinalityError");
        } catch (const CardinalityError& e) {
            CHECK(std::string(e.what()) == "duplicate 3");
        }
    }
    SUBCASE("out of order") {
        std::swap(j["optimization_suggestions"][0], j["optimization_suggestions"][1]);
        CHECK_THROWS_AS(validate_optimization_report(j.dump()), CardinalityError);
    }
}

TEST_CASE("capability lists reject blanks and normalized duplicates") {
    Json j = Json::parse(sample("turn2.json"));
    auto& caps = j["capability_information"]["task_required_capabilities"];
    SUBCASE("duplicate after normalization") {
        caps.push_back("  " + caps[0].get<std::string>() + "!! ");
        try {
            validate_intent_analysis(j.dump());
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.field_path() == "capability_information.task_required_capabilities[6]");
        }
    }
    SUBCASE("empty list") {
        caps = Json::array();
        CHECK_THROWS_AS(validate_intent_analysis(j.dump()), SchemaError);
    }
    SUBCASE("missing field") {
        j.erase("agent_plan");
        try {
            validate_intent_analysis(j.dump());
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.field_path() == "agent_plan");
        }
    }
}

TEST_CASE("unknown top-level keys are kept") {
    Json j = Json::parse(sample("turn4.json"));
    j["notes"] = "kept";
    const auto p = validate_optimized_prompt(j.dump());
    CHECK(p.extra["notes"] == "kept");
    CHECK(to_json(p)["notes"] == "kept");
}

TEST_CASE("final prompt may not carry template placeholders") {
    CHECK_THROWS_AS(validate_optimized_prompt(R"({"optimized_prompt": "Answer for {audience} please."})"), SchemaError);
    CHECK_NOTHROW(validate_optimized_prompt(R"({"optimized_prompt": "Return JSON like {\"a\": 1}."})"));
}

TEST_CASE("payload extraction") {
    SUBCASE("fenced block") {
        const std::string raw = "Sure!\n```json\n{\"optimized_prompt\": \"x\"}\n```\nDone.";
        CHECK(validate_optimized_prompt(raw).optimized_prompt == "x");
    }
    SUBCASE("prose around a bare object") {
        const std::string raw = "Here you go: {\"optimized_prompt\": \"a {b} c\"} hope it helps";
        CHECK(extract_json_payload(raw) == "{\"optimized_prompt\": \"a {b} c\"}");
    }
    SUBCASE("no object") { CHECK_THROWS_AS(extract_json_payload("no json here"), SchemaError); }
    SUBCASE("broken json") { CHECK_THROWS_AS(parse_payload("{\"a\": }"), SchemaError); }
}

TEST_CASE("user request rendering and validation") {
    UserRequest r{"Plan a trip", {"likes trains", "short answers"}, std::nullopt, std::nullopt};
    CHECK(r.render() == "Plan a trip\n\nPreferences:\n- likes trains\n- short answers");
    r.preferences.clear();
    CHECK(r.render() == "Plan a trip");
    r.intent_text = "   ";
    CHECK_THROWS_AS(r.validate(), SchemaError);
}

TEST_CASE("judgment arithmetic examples") {
    const Judgment j(7, 8, 8, 9);
    CHECK(j.avg_a().value() == 7.5);
    CHECK(j.avg_b().value() == 8.5);
    CHECK(j.winner() == Winner::SecondBetter);
    CHECK(Judgment(5, 5, 5, 5).winner() == Winner::Same);
    CHECK(Judgment(10, 1, 5, 6).winner() == Winner::Same);
    CHECK_THROWS_AS(Judgment(0, 5, 5, 5), Error);
    CHECK_THROWS_AS(Judgment(5, 5, 11, 5), Error);
}

TEST_CASE("presented order maps back to the canonical frame") {
    const auto ab = Judgment::from_presented(8, 8, 6, 6, PresentedOrder::AB);
    CHECK(ab.winner() == Winner::FirstBetter);
    const auto ba = Judgment::from_presented(8, 8, 6, 6, PresentedOrder::BA);
    CHECK(ba.winner() == Winner::SecondBetter);
    CHECK(ba.align_b() == 8);
    CHECK(ba.presented_order() == PresentedOrder::BA);
    CHECK(ba.swapped().winner() == Winner::FirstBetter);
}

TEST_CASE("judgment json rejects an inconsistent winner") {
    Json j = to_json(Judgment(7, 8, 8, 9));
    CHECK(judgment_from_json(j) == Judgment(7, 8, 8, 9));
    j["winner"] = 1;
    CHECK_THROWS_AS(judgment_from_json(j), SchemaError);
}

TEST_CASE("domain registry") {
    const auto& reg = DomainRegistry::builtin();
    CHECK(reg.size() == kDomainCount);
    std::set<std::string> ids;
    for (const auto& d : reg.domains()) {
        ids.insert(d.id);
        CHECK_FALSE(d.theme_description.empty());
    }
    CHECK(ids.size() == kDomainCount);
    CHECK(reg.contains("travel-and-tourism"));
    CHECK_FALSE(reg.contains("astrology"));
}

TEST_CASE("dialogue json checks the domain and prefixes nested paths") {
    Dialogue d;
    d.dialogue_id = "x-00001";
    d.domain = "travel-and-tourism";
    d.teacher = "t";
    d.turn1 = testutil::sample_request();
    d.turn2 = validate_intent_analysis(sample("turn2.json"));
    d.turn3 = validate_optimization_report(sample("turn3.json"));
    d.turn4 = validate_optimized_prompt(sample("turn4.json"));
    CHECK(dialogue_from_json(to_json(d)) == d);

    Json bad = to_json(d);
    bad["domain"] = "astrology";
    CHECK_THROWS_AS(dialogue_from_json(bad), SchemaError);

    bad = to_json(d);
    bad["turn3"]["optimization_suggestions"][0]["title"] = "";
    try {
        dialogue_from_json(bad);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.field_path().rfind("turn3.", 0) == 0);
    }
}

}  // TEST_SUITE
