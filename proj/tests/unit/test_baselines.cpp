// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "helpers.hpp"
#include "pforge/baselines.hpp"

using namespace pforge;

namespace {

const UserRequest kRequest{"Write a cover letter for a junior data analyst role", {"keep it under 300 words"},
                           std::nullopt, std::nullopt};

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("each strategy stays within its call budget") {
    for (auto s : {Strategy::Original, Strategy::CoT, Strategy::Expert, Strategy::Evoke, Strategy::Refine}) {
        CAPTURE(to_string(s));
        Gateway g(std::make_shared<TemplateMockBackend>());
        const auto out = run_strategy(s, kRequest, g, TemplateSet::defaults());
        CHECK(out.strategy == s);
        CHECK(out.calls_used == call_budget(s));
        CHECK(static_cast<int>(g.ledger().size()) == call_budget(s));
        CHECK_FALSE(out.prompt.empty());
    }
    CHECK(call_budget(Strategy::Evoke) == 9);
    CHECK(call_budget(Strategy::Evoke, 2) == 6);
}

TEST_CASE("ledger tags name the strategy") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    cot(kRequest, g, TemplateSet::defaults());
    expert(kRequest, g, TemplateSet::defaults());
    evoke(kRequest, g, TemplateSet::defaults(), 1);
    std::vector<std::string> tags;
    for (const auto& e : g.ledger().entries()) tags.push_back(e.purpose_tag);
    CHECK(tags == std::vector<std::string>{"baseline_cot", "baseline_expert", "baseline_expert", "baseline_evoke_author",
                                           "baseline_evoke_reviewer", "baseline_evoke_selector"});
}

TEST_CASE("chain of thought appends the directive asset") {
    auto b = std::make_shared<ScriptedMockBackend>();
    b->push_purpose("baseline_cot", "  Draft the letter.  ");
    Gateway g(b);
    auto templates = TemplateSet::defaults();
    templates.set("templates/cot_directive.txt", "Work it out in steps.\n");
    CHECK(cot(kRequest, g, templates).prompt == "Draft the letter.\n\nWork it out in steps.");
}

TEST_CASE("expert joins persona and task") {
    auto b = std::make_shared<ScriptedMockBackend>();
    b->push_purpose("baseline_expert", "You are a hiring manager.");
    b->push_purpose("baseline_expert", "Write the letter.");
    Gateway g(b);
    CHECK(expert(kRequest, g, TemplateSet::defaults()).prompt == "You are a hiring manager.\n\nWrite the letter.");
}

TEST_CASE("a failed persona call stops the expert strategy") {
    auto b = std::make_shared<ScriptedMockBackend>();
    b->push_purpose("baseline_expert", BackendReply{403, "forbidden"});
    Gateway g(b);
    CHECK_THROWS_AS(expert(kRequest, g, TemplateSet::defaults()), BackendRefusal);
    CHECK(g.ledger().size() == 1);
}

TEST_CASE("evoke feeds the selected focus into the next draft") {
    auto b = std::make_shared<ScriptedMockBackend>();
    b->push_purpose("baseline_evoke_author", "draft one");
    b->push_purpose("baseline_evoke_author", "draft two");
    b->push_purpose("baseline_evoke_reviewer", "too long");
    b->push_purpose("baseline_evoke_selector", "- FOCUS-SENTINEL");
    Gateway g(b);
    const auto out = evoke(kRequest, g, TemplateSet::defaults(), 2);
    CHECK(out.prompt == "draft two");
    CHECK(out.calls_used == 6);
    const auto seen = b->seen();
    CHECK(seen[3].second.messages[0].content.find("FOCUS-SENTINEL") != std::string::npos);
    CHECK(seen[3].second.messages[0].content.find("draft one") != std::string::npos);
    CHECK_THROWS_AS(evoke(kRequest, g, TemplateSet::defaults(), 0), Error);
}

TEST_CASE("empty replies are rejected") {
    auto b = std::make_shared<ScriptedMockBackend>();
    b->push_purpose("baseline_original", "   \n");
    Gateway g(b);
    CHECK_THROWS_AS(original_transform(kRequest, g, TemplateSet::defaults()), Error);
}

TEST_CASE("strategy names") {
    CHECK(strategy_from_string("evoke") == Strategy::Evoke);
    CHECK(std::string(to_string(Strategy::Refine)) == "refine");
    CHECK_THROWS_AS(strategy_from_string("magic"), Error);
}

}  // TEST_SUITE
