// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "helpers.hpp"
#include "pforge/capabilities.hpp"

using namespace pforge;

TEST_SUITE("capabilities") {

TEST_CASE("financial report channels merge into fifteen entries") {
    // tests/oracles/capability_union.py prints "9 6 15" for this payload.
    const auto a = validate_intent_analysis(testutil::sample("turn2.json"));
    const auto set = collect(a.capability_information.explicit_inferred_capabilities,
                             a.capability_information.task_required_capabilities, {});
    CHECK(set.size() == 15);
    CHECK(set.entries()[0].sources == std::set<CapabilitySource>{CapabilitySource::IntentDerived});
    CHECK(set.entries()[14].sources == std::set<CapabilitySource>{CapabilitySource::TaskRequired});
}

TEST_CASE("normalization collapses case, spacing and edge punctuation") {
    const auto set = collect({"Data Analysis", "  data   analysis. "}, {"DATA ANALYSIS!"}, {"data-analysis"});
    REQUIRE(set.size() == 2);
    CHECK(set.entries()[0].text == "Data Analysis");
    CHECK(set.entries()[0].sources ==
          std::set<CapabilitySource>{CapabilitySource::IntentDerived, CapabilitySource::TaskRequired});
    CHECK(set.entries()[1].norm_key == "data-analysis");
    CHECK(set.find("DATA analysis") == &set.entries()[0]);
}

TEST_CASE("entries that normalize to nothing are skipped") {
    const auto set = collect({"...", "   "}, {"Budgeting"}, {});
    CHECK(set.size() == 1);
}

TEST_CASE("merging is idempotent") {
    const std::vector<std::string> a{"Forecasting", "Risk review"};
    const std::vector<std::string> b{"risk review", "Charting"};
    auto once = collect(a, b, {});
    auto twice = collect(a, b, {});
    twice.add(a, CapabilitySource::IntentDerived);
    twice.add(b, CapabilitySource::TaskRequired);
    CHECK(once.entries() == twice.entries());
}

TEST_CASE("rendering lists sources and caps the entry count") {
    const auto set = collect({"Forecasting", "Charting"}, {"forecasting"}, {"Plain language"});
    const auto text = render_for_prompt(set, 2);
    CHECK(text.find("- Forecasting [sources: intent-derived, task-required]\n") == 0);
    CHECK(text.find("- Charting [sources: intent-derived]\n") != std::string::npos);
    CHECK(text.find("Plain language") == std::string::npos);
    CHECK(text.size() > std::string(kBalancingInstruction).size());
    CHECK(text.substr(text.size() - std::string(kBalancingInstruction).size()) == kBalancingInstruction);
    CHECK_THROWS_AS(render_for_prompt(set, 0), Error);
}

}  // TEST_SUITE
