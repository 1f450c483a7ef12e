// SPDX-License-Identifier: Apache-2.0
// Offline backend that answers every pipeline purpose with a schema-valid payload
// derived from a hash of the request. Identical requests give identical bytes.
#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "pforge/gateway.hpp"
#include "pforge/text.hpp"

namespace pforge {

namespace {

constexpr std::array<std::string_view, 13> kPurposes{
    "turn2",         "turn3",           "turn4",
    "judge",         "intent_sim",      "filter",
    "respond",       "baseline_original", "baseline_cot",
    "baseline_expert", "baseline_evoke_author", "baseline_evoke_reviewer",
    "baseline_evoke_selector"};

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words{
        "about", "after", "again", "their", "there", "these", "those", "which", "while", "would", "could",
        "should", "where", "other", "being", "under", "above", "below", "every", "using", "include", "following",
        "output", "return", "fields", "field", "object", "single", "intent", "preferences", "json", "prompt",
        "please", "string", "strings", "array", "value", "values", "exactly", "section", "provide", "analysis"};
    return words;
}

constexpr std::array<std::string_view, 10> kTaskPool{
    "Organizing information into a clear structure",
    "Explaining concepts for the intended audience",
    "Researching relevant background facts",
    "Adapting tone and register to the reader",
    "Prioritizing the most important points",
    "Checking claims for accuracy and consistency",
    "Summarizing long material concisely",
    "Producing actionable recommendations",
    "Using accurate domain terminology",
    "Respecting stated length and format constraints"};

constexpr std::array<std::string_view, 8> kPreferencePool{
    "The user prefers short, concise responses.",
    "The user enjoys practical, step-by-step guidance.",
    "The user likes examples drawn from everyday life.",
    "The user prefers a friendly but professional tone.",
    "The user wants sources or references where possible.",
    "The user is a beginner and dislikes heavy jargon.",
    "The user prefers bullet points over long paragraphs.",
    "The user cares about budget-conscious options."};

constexpr std::array<std::string_view, 5> kSuggestionTitles{
    "Define an appropriate role for the agent",
    "Use precise, domain-specific terminology",
    "Provide any necessary extra background context",
    "Add missing details for completeness",
    "Specify the desired output format, length, and formatting"};

std::string_view between(std::string_view s, std::string_view open, std::string_view close) {
    auto b = s.find(open);
    if (b == std::string_view::npos) return s;
    b += open.size();
    auto e = s.find(close, b);
    if (e == std::string_view::npos) return s.substr(b);
    return s.substr(b, e - b);
}

std::string line_value(std::string_view s, std::string_view key) {
    for (const auto& line : text::split_lines(s)) {
        if (line.rfind(key, 0) == 0) return text::trim(std::string_view(line).substr(key.size()));
    }
    return {};
}

// Alphabetic words of at least five letters, first-seen order, no stopwords.
std::vector<std::string> content_words(std::string_view s) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 5 && !stopwords().count(cur) && seen.insert(cur).second) out.push_back(cur);
        cur.clear();
    };
    for (char c : s) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::vector<std::string> pick_words(const std::vector<std::string>& words, std::size_t n, text::SeededStream& rng) {
    std::vector<std::string> pool = words;
    std::vector<std::string> out;
    while (!pool.empty() && out.size() < n) {
        const auto i = static_cast<std::size_t>(rng.next() % pool.size());
        out.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return out;
}

template <std::size_t N>
std::vector<std::string> pick_pool(const std::array<std::string_view, N>& pool, std::size_t n, text::SeededStream& rng) {
    std::vector<std::string> all(pool.begin(), pool.end());
    return pick_words(all, n, rng);
}

std::string topic_phrase(const std::vector<std::string>& words) {
    if (words.empty()) return "the requested task";
    if (words.size() == 1) return words[0];
    return words[0] + " and " + words[1];
}

std::string dump(const Json& j) { return j.dump(2); }

std::string mock_turn2(std::string_view user, text::SeededStream& rng) {
    const auto intent = between(user, "<intent>", "</intent>");
    const auto words = content_words(intent);
    const auto focus = pick_words(words, 4, rng);
    const std::string topic = topic_phrase(focus);

    std::vector<std::string> explicit_caps;
    for (const auto& w : pick_words(words, static_cast<std::size_t>(rng.range(2, 5)), rng)) {
        explicit_caps.push_back("Addressing " + w + " as requested");
    }
    if (explicit_caps.empty()) explicit_caps.push_back("Addressing the stated request");

    Json j = Json::object();
    j["purpose"] = "To help the user with " + topic + ".";
    j["context"] = "The request concerns " + topic + " and should respect any stated preferences.";
    j["desired_outcome"] = "A clear, well-organized response about " + topic + " that meets the user's needs.";
    j["capability_information"]["explicit_inferred_capabilities"] = explicit_caps;
    j["capability_information"]["task_required_capabilities"] =
        pick_pool(kTaskPool, static_cast<std::size_t>(rng.range(3, 5)), rng);
    j["agent_plan"] = "The agent will clarify the goal, gather the key points about " + topic +
                      ", organize them logically, and present the result in the requested form.";
    j["initial_prompt"] = "Write a helpful, well-structured response about " + topic + ".";
    return dump(j);
}

std::string mock_turn3(std::string_view user, text::SeededStream& rng) {
    const auto words = content_words(between(user, "Purpose:", "\n"));
    const std::string topic = topic_phrase(pick_words(words, 2, rng));
    Json j = Json::object();
    j["summary"]["purpose"] = "To help the user with " + topic + ".";
    j["summary"]["context"] = "The response must stay aligned with the user's stated intent and preferences.";
    j["summary"]["desired_outcome"] = "A focused, high-quality answer about " + topic + ".";
    j["optimized_capabilities"] = pick_pool(kTaskPool, static_cast<std::size_t>(rng.range(3, 6)), rng);
    j["plan_prompt_improvement"] =
        "Strengthen the initial prompt by assigning a role, sharpening terminology, adding background, "
        "filling in missing details and fixing the output format.";
    Json suggestions = Json::array();
    for (std::size_t i = 0; i < kSuggestionTitles.size(); ++i) {
        Json s = Json::object();
        s["suggestion_number"] = static_cast<int>(i) + 1;
        s["title"] = std::string(kSuggestionTitles[i]);
        s["description"] = "Apply this to the prompt about " + topic + " (variant " +
                           std::to_string(rng.range(1, 9)) + ").";
        suggestions.push_back(std::move(s));
    }
    j["optimization_suggestions"] = std::move(suggestions);
    return dump(j);
}

std::string mock_turn4(std::string_view user, text::SeededStream& rng) {
    const auto words = content_words(between(user, "Purpose:", "\n"));
    const std::string topic = topic_phrase(pick_words(words, 2, rng));
    Json j = Json::object();
    j["optimized_prompt"] = "You are a knowledgeable specialist in " + topic +
                            ". Produce a well-structured response that addresses the user's goal directly, "
                            "uses precise terminology, states any assumptions, and ends with a short summary. "
                            "Keep it to roughly " + std::to_string(rng.range(3, 8) * 100) + " words.";
    return dump(j);
}

std::string mock_judge(text::SeededStream& rng) {
    Json j = Json::object();
    j["align_a"] = rng.range(4, 10);
    j["quality_a"] = rng.range(4, 10);
    j["align_b"] = rng.range(4, 10);
    j["quality_b"] = rng.range(4, 10);
    j["rationale"] = "Scores reflect alignment with the intent and overall usefulness.";
    return dump(j);
}

std::string mock_filter() {
    Json j = Json::object();
    j["quality"] = 8;
    j["alignment"] = 8;
    j["rationale"] = "The prompt is specific and faithful to the intent.";
    return dump(j);
}

std::string mock_intent(std::string_view user, text::SeededStream& rng) {
    std::string domain = line_value(user, "Domain:");
    std::string theme = line_value(user, "Themes:");
    const std::string style = line_value(user, "Style:");
    if (domain.empty()) domain = "everyday topics";
    if (theme.empty()) theme = "general questions";
    const auto theme_words = content_words(theme);
    const std::string focus = theme_words.empty() ? theme : theme_words[rng.next() % theme_words.size()];

    std::string intent;
    if (style == "underspecified") {
        intent = "I need some help with " + focus + " in " + domain + ".";
        if (rng.range(0, 1) == 1) intent += " Can you point me in the right direction?";
    } else {
        intent = "I want to put together a practical overview of " + focus + " for " + domain +
                 ". It should cover the main considerations, common mistakes, and a few concrete examples. "
                 "Please organize it so I can act on it quickly, and flag anything that needs expert review.";
    }
    Json j = Json::object();
    j["intent"] = intent;
    j["preferences"] = pick_pool(kPreferencePool, static_cast<std::size_t>(rng.range(0, 3)), rng);
    return dump(j);
}

std::string mock_text(std::string_view purpose, std::string_view user, text::SeededStream& rng) {
    const auto words = content_words(user);
    const std::string topic = topic_phrase(pick_words(words, 2, rng));
    if (purpose == "respond") {
        return "Here is a response about " + topic + ". It covers the key points in order and closes with a summary.";
    }
    if (purpose == "baseline_original" || purpose == "baseline_cot") {
        return "Write a clear and helpful response about " + topic + ".";
    }
    if (purpose == "baseline_expert") {
        return "You are an experienced expert in " + topic + " with years of practical work in the field.";
    }
    if (purpose == "baseline_evoke_author") {
        return "Write a detailed, well-organized response about " + topic + ", addressing the reviewer's points.";
    }
    if (purpose == "baseline_evoke_reviewer") {
        return "1. The prompt could specify the audience.\n2. The prompt could state a length limit.\n"
               "3. The prompt could ask for examples.";
    }
    return "Focus next on: audience and length.";  // baseline_evoke_selector
}

}  // namespace

bool is_template_mock_purpose(std::string_view purpose_tag) {
    return std::find(kPurposes.begin(), kPurposes.end(), purpose_tag) != kPurposes.end();
}

std::string template_mock_complete(const ChatRequest& request, std::string_view purpose_tag) {
    if (!is_template_mock_purpose(purpose_tag)) {
        throw Error(ErrorCode::UnknownPurpose, "template mock has no generator for '" + std::string(purpose_tag) + "'");
    }
    text::SeededStream rng(text::seed_from_hex(request.digest()) ^
                           text::seed_from_hex(text::sha256_hex(purpose_tag)));
    const ChatMessage* last = request.last_user_message();
    const std::string_view user = last ? std::string_view(last->content) : std::string_view{};

    if (purpose_tag == "turn2") return mock_turn2(user, rng);
    if (purpose_tag == "turn3") return mock_turn3(user, rng);
    if (purpose_tag == "turn4") return mock_turn4(user, rng);
    if (purpose_tag == "judge") return mock_judge(rng);
    if (purpose_tag == "filter") return mock_filter();
    if (purpose_tag == "intent_sim") return mock_intent(user, rng);
    return mock_text(purpose_tag, user, rng);
}

BackendReply TemplateMockBackend::send(const ChatRequest& request, std::string_view purpose_tag) {
    return BackendReply{200, template_mock_complete(request, purpose_tag)};
}

}  // namespace pforge
