// SPDX-License-Identifier: Apache-2.0
#include "pforge/pipeline.hpp"

#include "pforge/text.hpp"

namespace pforge {

namespace {

std::string bullet_list(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& i : items) out += "- " + i + "\n";
    return out;
}

std::vector<std::string> texts_of(const std::vector<ScoredRecord>& hits) {
    std::vector<std::string> out;
    for (const auto& h : hits) out.push_back(h.record.text);
    return out;
}

}  // namespace

CuratedContext curate(const IntentAnalysis& analysis, const std::vector<std::string>& retrieved_capabilities) {
    CuratedContext ctx;
    ctx.purpose = analysis.purpose;
    ctx.context = analysis.context;
    ctx.desired_outcome = analysis.desired_outcome;
    ctx.capabilities = collect(analysis.capability_information.explicit_inferred_capabilities,
                               analysis.capability_information.task_required_capabilities, retrieved_capabilities);
    ctx.agent_plan = analysis.agent_plan;
    ctx.initial_prompt = analysis.initial_prompt;
    return ctx;
}

std::string render_context(const CuratedContext& ctx, std::size_t max_capabilities) {
    std::string out;
    out += "Purpose: " + ctx.purpose + "\n";
    out += "Context: " + ctx.context + "\n";
    out += "Desired outcome: " + ctx.desired_outcome + "\n\n";
    out += "Capabilities:\n" + render_for_prompt(ctx.capabilities, max_capabilities) + "\n\n";
    out += "Agent plan: " + ctx.agent_plan + "\n\n";
    out += "Initial prompt: " + ctx.initial_prompt;
    if (ctx.optimized_capabilities) {
        out += "\n\nOptimized capabilities:\n" + bullet_list(*ctx.optimized_capabilities);
        if (out.back() == '\n') out.pop_back();
    }
    if (ctx.suggestions) {
        out += "\n\nSuggestions:";
        for (const auto& s : *ctx.suggestions) {
            out += "\n" + std::to_string(s.suggestion_number) + ". " + s.title + ": " + s.description;
        }
    }
    return out;
}

RefinePipeline::RefinePipeline(Gateway gateway, TemplateSet templates, PipelineOptions options,
                               const PreferenceStore* store)
    : gateway_(std::move(gateway)), templates_(std::move(templates)), options_(options), store_(store) {
    if (options_.max_parse_retries < 0) throw Error(ErrorCode::Validation, "max_parse_retries must be >= 0");
}

std::vector<ChatMessage> RefinePipeline::with_system(std::string user_content) const {
    return {ChatMessage{Role::System, templates_.get("templates/agent_system.txt")},
            ChatMessage{Role::User, std::move(user_content)}};
}

template <typename T, typename Validate>
T RefinePipeline::ask(const std::string& tag, std::vector<ChatMessage> messages, Validate validate) {
    const double temperature = gateway_.options().generation_temperature;
    for (int attempt = 1;; ++attempt) {
        auto request = gateway_.make_request(messages, temperature);
        std::string response = gateway_.complete(request, tag);
        transcript_.push_back({tag, request, response});
        try {
            return validate(response);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Schema && e.code() != ErrorCode::Cardinality) throw;
            if (attempt > options_.max_parse_retries) throw TurnParseError(tag, attempt, e.what());
            ++parse_retries_;
            messages.push_back({Role::Assistant, text::is_blank(response) ? std::string("(empty reply)") : response});
            messages.push_back({Role::User, templates_.render("templates/reask.txt", {{"error", e.what()}})});
        }
    }
}

IntentAnalysis RefinePipeline::turn_analyze(const UserRequest& request,
                                            const std::vector<ScoredRecord>& retrieved_prefs) {
    request.validate();
    std::string prefs_block;
    if (!retrieved_prefs.empty()) {
        prefs_block = templates_.render("templates/retrieved_preferences.txt",
                                        {{"preferences", bullet_list(texts_of(retrieved_prefs))}});
    }
    auto user = templates_.render("templates/turn2_user.txt",
                                  {{"intent", request.render()}, {"retrieved_preferences", prefs_block}});
    return ask<IntentAnalysis>("turn2", with_system(std::move(user)),
                               [](const std::string& raw) { return validate_intent_analysis(raw); });
}

OptimizationReport RefinePipeline::turn_suggest(CuratedContext& ctx) {
    auto user = templates_.render("templates/turn3_user.txt",
                                  {{"curated_context", render_context(ctx, options_.max_capabilities)}});
    auto report = ask<OptimizationReport>("turn3", with_system(std::move(user)),
                                          [](const std::string& raw) { return validate_optimization_report(raw); });
    ctx.optimized_capabilities = report.optimized_capabilities;
    ctx.suggestions = report.optimization_suggestions;
    return report;
}

OptimizedPrompt RefinePipeline::turn_finalize(const CuratedContext& ctx) {
    if (!ctx.suggestions) {
        throw Error(ErrorCode::MissingSuggestions, "final prompt requested before optimization suggestions exist");
    }
    auto user = templates_.render("templates/turn4_user.txt",
                                  {{"curated_context", render_context(ctx, options_.max_capabilities)}});
    return ask<OptimizedPrompt>("turn4", with_system(std::move(user)),
                                [](const std::string& raw) { return validate_optimized_prompt(raw); });
}

RefinementResult RefinePipeline::run(const UserRequest& request) {
    request.validate();
    transcript_.clear();
    parse_retries_ = 0;

    std::vector<ScoredRecord> prefs;
    std::vector<ScoredRecord> notes;
    if (options_.use_preference_store && store_ && request.user_id) {
        const auto query = request.render();
        prefs = store_->retrieve(*request.user_id, query, options_.retrieve_k, RecordKind::Preference);
        notes = store_->retrieve(*request.user_id, query, options_.retrieve_k, RecordKind::CapabilityNote);
    }

    RefinementResult result;
    result.analysis = turn_analyze(request, prefs);

    CuratedContext ctx = curate(result.analysis, texts_of(notes));
    if (!prefs.empty()) {
        ctx.context += " Known user preferences: " + text::join(texts_of(prefs), " ");
    }

    result.report = turn_suggest(ctx);
    result.final = turn_finalize(ctx);
    result.transcript = transcript_;
    result.parse_retries = parse_retries_;
    result.calls_used = static_cast<int>(transcript_.size());
    result.retrieved = prefs;
    result.retrieved.insert(result.retrieved.end(), notes.begin(), notes.end());
    return result;
}

}  // namespace pforge
