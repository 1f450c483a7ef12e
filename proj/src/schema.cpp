// SPDX-License-Identifier: Apache-2.0
#include "pforge/schema.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "pforge/domains.hpp"
#include "pforge/text.hpp"

namespace pforge {

namespace {

std::string at(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i) {
    return parent + "[" + std::to_string(i) + "]";
}

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path, "missing");
    return *it;
}

std::string require_text(const Json& obj, const std::string& key, const std::string& parent) {
    const std::string path = at(parent, key);
    const Json& v = require(obj, key, path);
    if (!v.is_string()) throw SchemaError(path, "expected string");
    auto s = v.get<std::string>();
    if (text::is_blank(s)) throw SchemaError(path, "empty");
    return s;
}

std::vector<std::string> require_text_list(const Json& obj, const std::string& key, const std::string& parent,
                                           bool allow_empty) {
    const std::string path = at(parent, key);
    const Json& v = require(obj, key, path);
    if (!v.is_array()) throw SchemaError(path, "expected array");
    if (v.empty() && !allow_empty) throw SchemaError(path, "empty list");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) throw SchemaError(index_path(path, i), "expected string");
        auto s = v[i].get<std::string>();
        if (text::is_blank(s)) throw SchemaError(index_path(path, i), "empty");
        out.push_back(std::move(s));
    }
    return out;
}

void require_object(const Json& v, const std::string& path) {
    if (!v.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected object");
}

void reject_normalized_duplicates(const std::vector<std::string>& items, const std::string& path) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto key = text::normalize_key(items[i]);
        if (key.empty()) throw SchemaError(index_path(path, i), "no content after normalization");
        if (!seen.insert(key).second) throw SchemaError(index_path(path, i), "duplicate capability '" + items[i] + "'");
    }
}

Json collect_extra(const Json& obj, std::initializer_list<const char*> known) {
    Json extra = Json::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool is_known = std::any_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; });
        if (!is_known) extra[it.key()] = it.value();
    }
    return extra;
}

void append_extra(Json& out, const Json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
}

// Keyword families for the five suggestion slots, in order.
const std::array<std::vector<std::string>, kSuggestionCount>& suggestion_topics() {
    static const std::array<std::vector<std::string>, kSuggestionCount> topics{{
        {"role", "persona", "identity"},
        {"terminolog", "vocabular", "domain", "jargon", "terms"},
        {"context", "background"},
        {"missing", "detail", "complete", "specific"},
        {"format", "length", "output", "structure"},
    }};
    return topics;
}

const char* suggestion_topic_name(std::size_t i) {
    static constexpr std::array<const char*, kSuggestionCount> names{
        "agent role", "domain terminology", "background context", "missing details", "output format/length"};
    return names[i];
}

int require_int_in(const Json& obj, const std::string& key, const std::string& parent) {
    const std::string path = at(parent, key);
    const Json& v = require(obj, key, path);
    if (!v.is_number_integer()) throw SchemaError(path, "expected integer");
    return v.get<int>();
}

}  // namespace

// ---------------------------------------------------------------------------

void UserRequest::validate() const {
    if (text::is_blank(intent_text)) throw SchemaError("intent_text", "empty");
    for (std::size_t i = 0; i < preferences.size(); ++i) {
        if (text::is_blank(preferences[i])) throw SchemaError(index_path("preferences", i), "empty");
    }
}

std::string UserRequest::render() const {
    std::string out = text::trim(intent_text);
    if (!preferences.empty()) {
        out += "\n\nPreferences:";
        for (const auto& p : preferences) out += "\n- " + text::trim(p);
    }
    return out;
}

const char* to_string(IntentStyle s) { return s == IntentStyle::Detailed ? "detailed" : "underspecified"; }

IntentStyle intent_style_from_string(std::string_view s) {
    if (s == "detailed") return IntentStyle::Detailed;
    if (s == "underspecified") return IntentStyle::Underspecified;
    throw SchemaError("intent_style", "unknown style '" + std::string(s) + "'");
}

const char* to_string(PresentedOrder o) { return o == PresentedOrder::AB ? "AB" : "BA"; }

PresentedOrder presented_order_from_string(std::string_view s) {
    if (s == "AB") return PresentedOrder::AB;
    if (s == "BA") return PresentedOrder::BA;
    throw SchemaError("presented_order", "expected AB or BA");
}

bool score_in_range(int score) { return score >= 1 && score <= 10; }

Winner winner_from_averages(HalfAverage a, HalfAverage b) {
    if (a > b) return Winner::FirstBetter;
    if (b > a) return Winner::SecondBetter;
    return Winner::Same;
}

Judgment::Judgment(int align_a, int quality_a, int align_b, int quality_b, std::string rationale,
                   PresentedOrder presented)
    : align_a_(align_a),
      quality_a_(quality_a),
      align_b_(align_b),
      quality_b_(quality_b),
      avg_a_(align_a, quality_a),
      avg_b_(align_b, quality_b),
      winner_(winner_from_averages(avg_a_, avg_b_)),
      rationale_(std::move(rationale)),
      presented_(presented) {
    for (int s : {align_a, quality_a, align_b, quality_b}) {
        if (!score_in_range(s)) {
            throw Error(ErrorCode::OutOfRangeScore, "score " + std::to_string(s) + " outside [1,10]");
        }
    }
}

Judgment Judgment::from_presented(int align_left, int quality_left, int align_right, int quality_right,
                                  PresentedOrder presented, std::string rationale) {
    if (presented == PresentedOrder::AB) {
        return Judgment(align_left, quality_left, align_right, quality_right, std::move(rationale), presented);
    }
    return Judgment(align_right, quality_right, align_left, quality_left, std::move(rationale), presented);
}

Judgment Judgment::swapped() const {
    return Judgment(align_b_, quality_b_, align_a_, quality_a_, rationale_,
                    presented_ == PresentedOrder::AB ? PresentedOrder::BA : PresentedOrder::AB);
}

// ---------------------------------------------------------------------------

Json to_json(const UserRequest& v) {
    Json j = Json::object();
    j["intent_text"] = v.intent_text;
    j["preferences"] = v.preferences;
    if (v.user_id) j["user_id"] = *v.user_id;
    if (v.domain_hint) j["domain_hint"] = *v.domain_hint;
    return j;
}

Json to_json(const IntentAnalysis& v) {
    Json j = Json::object();
    j["purpose"] = v.purpose;
    j["context"] = v.context;
    j["desired_outcome"] = v.desired_outcome;
    j["capability_information"]["explicit_inferred_capabilities"] =
        v.capability_information.explicit_inferred_capabilities;
    j["capability_information"]["task_required_capabilities"] = v.capability_information.task_required_capabilities;
    j["agent_plan"] = v.agent_plan;
    j["initial_prompt"] = v.initial_prompt;
    append_extra(j, v.extra);
    return j;
}

Json to_json(const OptimizationReport& v) {
    Json j = Json::object();
    j["summary"]["purpose"] = v.summary.purpose;
    j["summary"]["context"] = v.summary.context;
    j["summary"]["desired_outcome"] = v.summary.desired_outcome;
    j["optimized_capabilities"] = v.optimized_capabilities;
    j["plan_prompt_improvement"] = v.plan_prompt_improvement;
    Json suggestions = Json::array();
    for (const auto& s : v.optimization_suggestions) {
        Json e = Json::object();
        e["suggestion_number"] = s.suggestion_number;
        e["title"] = s.title;
        e["description"] = s.description;
        suggestions.push_back(std::move(e));
    }
    j["optimization_suggestions"] = std::move(suggestions);
    append_extra(j, v.extra);
    return j;
}

Json to_json(const OptimizedPrompt& v) {
    Json j = Json::object();
    j["optimized_prompt"] = v.optimized_prompt;
    append_extra(j, v.extra);
    return j;
}

Json to_json(const Dialogue& v) {
    Json j = Json::object();
    j["dialogue_id"] = v.dialogue_id;
    j["domain"] = v.domain;
    j["teacher"] = v.teacher;
    j["intent_style"] = to_string(v.intent_style);
    j["turn1"] = to_json(v.turn1);
    j["turn2"] = to_json(v.turn2);
    j["turn3"] = to_json(v.turn3);
    j["turn4"] = to_json(v.turn4);
    return j;
}

Json to_json(const Judgment& v) {
    Json j = Json::object();
    j["align_a"] = v.align_a();
    j["quality_a"] = v.quality_a();
    j["align_b"] = v.align_b();
    j["quality_b"] = v.quality_b();
    j["avg_a"] = v.avg_a().value();
    j["avg_b"] = v.avg_b().value();
    j["winner"] = static_cast<int>(v.winner());
    j["rationale"] = v.rationale();
    j["presented_order"] = to_string(v.presented_order());
    return j;
}

Json to_json(const Verdict& v) {
    Json j = Json::object();
    Json trials = Json::array();
    for (const auto& t : v.trials) trials.push_back(to_json(t));
    j["trials"] = std::move(trials);
    j["winner"] = static_cast<int>(v.winner);
    j["extra_rounds"] = v.extra_rounds;
    return j;
}

UserRequest user_request_from_json(const Json& j) {
    require_object(j, "");
    UserRequest r;
    r.intent_text = require_text(j, "intent_text", "");
    if (j.contains("preferences")) r.preferences = require_text_list(j, "preferences", "", true);
    if (j.contains("user_id") && !j["user_id"].is_null()) {
        if (!j["user_id"].is_string()) throw SchemaError("user_id", "expected string");
        r.user_id = j["user_id"].get<std::string>();
    }
    if (j.contains("domain_hint") && !j["domain_hint"].is_null()) {
        if (!j["domain_hint"].is_string()) throw SchemaError("domain_hint", "expected string");
        r.domain_hint = j["domain_hint"].get<std::string>();
    }
    r.validate();
    return r;
}

IntentAnalysis intent_analysis_from_json(const Json& j) {
    require_object(j, "");
    IntentAnalysis a;
    a.purpose = require_text(j, "purpose", "");
    a.context = require_text(j, "context", "");
    a.desired_outcome = require_text(j, "desired_outcome", "");
    const Json& caps = require(j, "capability_information", "capability_information");
    require_object(caps, "capability_information");
    a.capability_information.explicit_inferred_capabilities =
        require_text_list(caps, "explicit_inferred_capabilities", "capability_information", false);
    a.capability_information.task_required_capabilities =
        require_text_list(caps, "task_required_capabilities", "capability_information", false);
    reject_normalized_duplicates(a.capability_information.explicit_inferred_capabilities,
                                 "capability_information.explicit_inferred_capabilities");
    reject_normalized_duplicates(a.capability_information.task_required_capabilities,
                                 "capability_information.task_required_capabilities");
    a.agent_plan = require_text(j, "agent_plan", "");
    a.initial_prompt = require_text(j, "initial_prompt", "");
    a.extra = collect_extra(
        j, {"purpose", "context", "desired_outcome", "capability_information", "agent_plan", "initial_prompt"});
    return a;
}

OptimizationReport optimization_report_from_json(const Json& j) {
    require_object(j, "");
    OptimizationReport r;
    const Json& summary = require(j, "summary", "summary");
    require_object(summary, "summary");
    r.summary.purpose = require_text(summary, "purpose", "summary");
    r.summary.context = require_text(summary, "context", "summary");
    r.summary.desired_outcome = require_text(summary, "desired_outcome", "summary");
    r.optimized_capabilities = require_text_list(j, "optimized_capabilities", "", true);
    r.plan_prompt_improvement = require_text(j, "plan_prompt_improvement", "");

    const Json& list = require(j, "optimization_suggestions", "optimization_suggestions");
    if (!list.is_array()) throw SchemaError("optimization_suggestions", "expected array");
    if (list.size() != kSuggestionCount) {
        throw CardinalityError("expected " + std::to_string(kSuggestionCount) + ", got " +
                               std::to_string(list.size()));
    }
    std::vector<Suggestion> suggestions;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = index_path("optimization_suggestions", i);
        require_object(list[i], path);
        Suggestion s;
        s.suggestion_number = require_int_in(list[i], "suggestion_number", path);
        s.title = require_text(list[i], "title", path);
        s.description = require_text(list[i], "description", path);
        suggestions.push_back(std::move(s));
    }
    std::set<int> seen;
    for (const auto& s : suggestions) {
        if (!seen.insert(s.suggestion_number).second) {
            throw CardinalityError("duplicate " + std::to_string(s.suggestion_number));
        }
    }
    for (std::size_t i = 0; i < suggestions.size(); ++i) {
        const int expected = static_cast<int>(i) + 1;
        if (suggestions[i].suggestion_number != expected) {
            throw CardinalityError("expected suggestion_number " + std::to_string(expected) + " at position " +
                                   std::to_string(expected) + ", got " +
                                   std::to_string(suggestions[i].suggestion_number));
        }
        const auto title = text::to_lower(suggestions[i].title);
        const auto& topics = suggestion_topics()[i];
        const bool on_topic = std::any_of(topics.begin(), topics.end(),
                                          [&](const std::string& k) { return title.find(k) != std::string::npos; });
        if (!on_topic) {
            throw SchemaError(index_path("optimization_suggestions", i) + ".title",
                              std::string("does not address ") + suggestion_topic_name(i));
        }
    }
    r.optimization_suggestions = std::move(suggestions);
    r.extra = collect_extra(
        j, {"summary", "optimized_capabilities", "plan_prompt_improvement", "optimization_suggestions"});
    return r;
}

OptimizedPrompt optimized_prompt_from_json(const Json& j) {
    require_object(j, "");
    OptimizedPrompt p;
    p.optimized_prompt = require_text(j, "optimized_prompt", "");
    if (text::contains_placeholder(p.optimized_prompt)) {
        throw SchemaError("optimized_prompt", "contains an unresolved template placeholder");
    }
    p.extra = collect_extra(j, {"optimized_prompt"});
    return p;
}

Dialogue dialogue_from_json(const Json& j) {
    require_object(j, "");
    Dialogue d;
    d.dialogue_id = require_text(j, "dialogue_id", "");
    d.domain = require_text(j, "domain", "");
    if (!DomainRegistry::builtin().contains(d.domain)) throw SchemaError("domain", "not a registered domain");
    d.teacher = require_text(j, "teacher", "");
    d.intent_style = intent_style_from_string(require_text(j, "intent_style", ""));
    auto nested = [&](const char* key, auto parse) {
        const Json& v = require(j, key, key);
        try {
            return parse(v);
        } catch (const SchemaError& e) {
            throw SchemaError(e.field_path() == "$" ? std::string(key) : std::string(key) + "." + e.field_path(),
                              e.reason());
        }
    };
    d.turn1 = nested("turn1", user_request_from_json);
    d.turn2 = nested("turn2", intent_analysis_from_json);
    d.turn3 = nested("turn3", optimization_report_from_json);
    d.turn4 = nested("turn4", optimized_prompt_from_json);
    return d;
}

Judgment judgment_from_json(const Json& j) {
    require_object(j, "");
    const int aa = require_int_in(j, "align_a", "");
    const int qa = require_int_in(j, "quality_a", "");
    const int ab = require_int_in(j, "align_b", "");
    const int qb = require_int_in(j, "quality_b", "");
    for (auto [name, v] : {std::pair{"align_a", aa}, {"quality_a", qa}, {"align_b", ab}, {"quality_b", qb}}) {
        if (!score_in_range(v)) throw SchemaError(name, "score outside [1,10]");
    }
    std::string rationale = j.contains("rationale") && j["rationale"].is_string() ? j["rationale"].get<std::string>()
                                                                                   : std::string{};
    PresentedOrder order = PresentedOrder::AB;
    if (j.contains("presented_order")) order = presented_order_from_string(j["presented_order"].get<std::string>());
    Judgment out(aa, qa, ab, qb, std::move(rationale), order);
    if (j.contains("winner") && j["winner"].get<int>() != static_cast<int>(out.winner())) {
        throw SchemaError("winner", "inconsistent with averages");
    }
    return out;
}

Verdict verdict_from_json(const Json& j) {
    require_object(j, "");
    Verdict v;
    const Json& trials = require(j, "trials", "trials");
    if (!trials.is_array()) throw SchemaError("trials", "expected array");
    for (const auto& t : trials) v.trials.push_back(judgment_from_json(t));
    v.winner = static_cast<Winner>(require_int_in(j, "winner", ""));
    v.extra_rounds = require_int_in(j, "extra_rounds", "");
    return v;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> largest_fenced_block(std::string_view raw) {
    std::optional<std::string> best;
    std::size_t pos = 0;
    while (true) {
        auto open = raw.find("```", pos);
        if (open == std::string_view::npos) break;
        auto line_end = raw.find('\n', open + 3);
        if (line_end == std::string_view::npos) break;
        auto close = raw.find("```", line_end + 1);
        if (close == std::string_view::npos) break;
        std::string body(raw.substr(line_end + 1, close - line_end - 1));
        if (!best || body.size() > best->size()) best = std::move(body);
        pos = close + 3;
    }
    return best;
}

std::optional<std::string> first_balanced_object(std::string_view raw) {
    auto start = raw.find('{');
    while (start != std::string_view::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return std::string(raw.substr(start, i - start + 1));
            }
        }
        start = raw.find('{', start + 1);
    }
    return std::nullopt;
}

bool parses_as_object(const std::string& s) {
    return Json::accept(s) && Json::parse(s).is_object();
}

}  // namespace

std::string extract_json_payload(std::string_view raw) {
    const std::string whole = text::trim(raw);
    if (!whole.empty() && whole.front() == '{' && parses_as_object(whole)) return whole;
    if (auto fenced = largest_fenced_block(raw)) {
        auto body = text::trim(*fenced);
        if (parses_as_object(body)) return body;
        if (auto inner = first_balanced_object(body); inner && parses_as_object(*inner)) return *inner;
    }
    if (auto obj = first_balanced_object(raw)) return *obj;
    throw SchemaError("$", "no JSON object found");
}

Json parse_payload(std::string_view raw) {
    const std::string payload = extract_json_payload(raw);
    try {
        return Json::parse(payload);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
}

IntentAnalysis validate_intent_analysis(std::string_view raw) { return intent_analysis_from_json(parse_payload(raw)); }

OptimizationReport validate_optimization_report(std::string_view raw) {
    return optimization_report_from_json(parse_payload(raw));
}

OptimizedPrompt validate_optimized_prompt(std::string_view raw) { return optimized_prompt_from_json(parse_payload(raw)); }

}  // namespace pforge
