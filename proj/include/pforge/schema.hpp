// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pforge/errors.hpp"

namespace pforge {

// Field order matters for the canonical serialization, so everything uses ordered_json.
using Json = nlohmann::ordered_json;

struct UserRequest {
    std::string intent_text;
    std::vector<std::string> preferences;
    std::optional<std::string> user_id;
    std::optional<std::string> domain_hint;

    // Throws SchemaError on blank intent or empty preference entries.
    void validate() const;
    // Intent with preference statements appended, as the model sees it.
    std::string render() const;

    bool operator==(const UserRequest&) const = default;
};

struct CapabilityInformation {
    std::vector<std::string> explicit_inferred_capabilities;
    std::vector<std::string> task_required_capabilities;

    bool operator==(const CapabilityInformation&) const = default;
};

struct IntentAnalysis {
    std::string purpose;
    std::string context;
    std::string desired_outcome;
    CapabilityInformation capability_information;
    std::string agent_plan;
    std::string initial_prompt;
    Json extra = Json::object();  // unknown top-level keys, preserved verbatim

    bool operator==(const IntentAnalysis&) const = default;
};

struct Summary {
    std::string purpose;
    std::string context;
    std::string desired_outcome;

    bool operator==(const Summary&) const = default;
};

struct Suggestion {
    int suggestion_number = 0;
    std::string title;
    std::string description;

    bool operator==(const Suggestion&) const = default;
};

inline constexpr std::size_t kSuggestionCount = 5;

struct OptimizationReport {
    Summary summary;
    std::vector<std::string> optimized_capabilities;
    std::string plan_prompt_improvement;
    std::vector<Suggestion> optimization_suggestions;
    Json extra = Json::object();

    bool operator==(const OptimizationReport&) const = default;
};

struct OptimizedPrompt {
    std::string optimized_prompt;
    Json extra = Json::object();

    bool operator==(const OptimizedPrompt&) const = default;
};

enum class IntentStyle { Detailed, Underspecified };

const char* to_string(IntentStyle s);
IntentStyle intent_style_from_string(std::string_view s);

struct Dialogue {
    std::string dialogue_id;
    std::string domain;
    std::string teacher;
    IntentStyle intent_style = IntentStyle::Detailed;
    UserRequest turn1;
    IntentAnalysis turn2;
    OptimizationReport turn3;
    OptimizedPrompt turn4;

    bool operator==(const Dialogue&) const = default;
};

// ---------------------------------------------------------------------------
// Judging

enum class Winner : int { Same = 0, FirstBetter = 1, SecondBetter = 2 };

enum class PresentedOrder { AB, BA };

const char* to_string(PresentedOrder o);
PresentedOrder presented_order_from_string(std::string_view s);

// Mean of two integer scores held exactly as a count of halves.
class HalfAverage {
public:
    constexpr HalfAverage() = default;
    constexpr HalfAverage(int a, int b) : halves_(a + b) {}
    static constexpr HalfAverage from_halves(int halves) {
        HalfAverage h;
        h.halves_ = halves;
        return h;
    }
    constexpr int halves() const { return halves_; }
    constexpr double value() const { return halves_ / 2.0; }
    constexpr auto operator<=>(const HalfAverage&) const = default;

private:
    int halves_ = 0;
};

Winner winner_from_averages(HalfAverage a, HalfAverage b);

// One judge trial, always stored in the canonical A/B frame.
class Judgment {
public:
    // Throws Error(OutOfRangeScore) unless every score is in [1,10].
    Judgment(int align_a, int quality_a, int align_b, int quality_b, std::string rationale = {},
             PresentedOrder presented = PresentedOrder::AB);

    // Scores as the rater saw them (left = first presented) mapped back to A/B.
    static Judgment from_presented(int align_left, int quality_left, int align_right, int quality_right,
                                   PresentedOrder presented, std::string rationale = {});

    int align_a() const { return align_a_; }
    int quality_a() const { return quality_a_; }
    int align_b() const { return align_b_; }
    int quality_b() const { return quality_b_; }
    HalfAverage avg_a() const { return avg_a_; }
    HalfAverage avg_b() const { return avg_b_; }
    Winner winner() const { return winner_; }
    const std::string& rationale() const { return rationale_; }
    PresentedOrder presented_order() const { return presented_; }

    // Same trial with A and B exchanged.
    Judgment swapped() const;

    bool operator==(const Judgment&) const = default;

private:
    int align_a_;
    int quality_a_;
    int align_b_;
    int quality_b_;
    HalfAverage avg_a_;
    HalfAverage avg_b_;
    Winner winner_;
    std::string rationale_;
    PresentedOrder presented_;
};

struct Verdict {
    std::vector<Judgment> trials;
    Winner winner = Winner::Same;
    int extra_rounds = 0;

    bool operator==(const Verdict&) const = default;
};

bool score_in_range(int score);

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const UserRequest& v);
Json to_json(const IntentAnalysis& v);
Json to_json(const OptimizationReport& v);
Json to_json(const OptimizedPrompt& v);
Json to_json(const Dialogue& v);
Json to_json(const Judgment& v);
Json to_json(const Verdict& v);

UserRequest user_request_from_json(const Json& j);
IntentAnalysis intent_analysis_from_json(const Json& j);
OptimizationReport optimization_report_from_json(const Json& j);
OptimizedPrompt optimized_prompt_from_json(const Json& j);
Dialogue dialogue_from_json(const Json& j);
Judgment judgment_from_json(const Json& j);
Verdict verdict_from_json(const Json& j);

// Pulls the JSON payload out of model output: the largest ``` fenced block if any,
// otherwise the first balanced top-level object. Throws SchemaError("$", ...).
std::string extract_json_payload(std::string_view raw);
Json parse_payload(std::string_view raw);

IntentAnalysis validate_intent_analysis(std::string_view raw);
OptimizationReport validate_optimization_report(std::string_view raw);
OptimizedPrompt validate_optimized_prompt(std::string_view raw);

}  // namespace pforge
