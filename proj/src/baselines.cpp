// SPDX-License-Identifier: Apache-2.0
#include "pforge/baselines.hpp"

#include "pforge/text.hpp"

namespace pforge {

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::Original: return "original";
        case Strategy::CoT: return "cot";
        case Strategy::Expert: return "expert";
        case Strategy::Evoke: return "evoke";
        case Strategy::Refine: return "refine";
    }
    return "original";
}

Strategy strategy_from_string(std::string_view s) {
    for (auto k : {Strategy::Original, Strategy::CoT, Strategy::Expert, Strategy::Evoke, Strategy::Refine}) {
        if (s == to_string(k)) return k;
    }
    throw Error(ErrorCode::Validation, "unknown strategy '" + std::string(s) + "' (original, cot, expert, evoke, refine)");
}

int call_budget(Strategy s, int evoke_rounds) {
    switch (s) {
        case Strategy::Original:
        case Strategy::CoT: return 1;
        case Strategy::Expert: return 2;
        case Strategy::Evoke: return 3 * evoke_rounds;
        case Strategy::Refine: return 3;
    }
    return 0;
}

namespace {

struct Caller {
    Gateway& gateway;
    int calls = 0;

    std::string ask(std::string user, const char* tag) {
        auto request = gateway.make_request({ChatMessage{Role::User, std::move(user)}},
                                            gateway.options().generation_temperature);
        ++calls;
        auto reply = text::trim(gateway.complete(request, tag));
        if (reply.empty()) throw Error(ErrorCode::Validation, std::string(tag) + ": empty reply");
        return reply;
    }
};

}  // namespace

StrategyOutcome original_transform(const UserRequest& request, Gateway& gateway, const TemplateSet& templates) {
    request.validate();
    Caller c{gateway};
    auto prompt = c.ask(templates.render("templates/baseline_original.txt", {{"intent", request.render()}}),
                        "baseline_original");
    return {Strategy::Original, std::move(prompt), c.calls};
}

StrategyOutcome cot(const UserRequest& request, Gateway& gateway, const TemplateSet& templates) {
    request.validate();
    Caller c{gateway};
    auto prompt = c.ask(templates.render("templates/baseline_original.txt", {{"intent", request.render()}}),
                        "baseline_cot");
    prompt += "\n\n" + text::trim(templates.get("templates/cot_directive.txt"));
    return {Strategy::CoT, std::move(prompt), c.calls};
}

StrategyOutcome expert(const UserRequest& request, Gateway& gateway, const TemplateSet& templates) {
    request.validate();
    Caller c{gateway};
    auto persona = c.ask(templates.render("templates/baseline_expert_persona.txt", {{"intent", request.render()}}),
                         "baseline_expert");
    auto task = c.ask(templates.render("templates/baseline_original.txt", {{"intent", request.render()}}),
                      "baseline_expert");
    return {Strategy::Expert, persona + "\n\n" + task, c.calls};
}

StrategyOutcome evoke(const UserRequest& request, Gateway& gateway, const TemplateSet& templates, int rounds) {
    if (rounds < 1) throw Error(ErrorCode::Validation, "evoke needs at least one round");
    request.validate();
    Caller c{gateway};
    const auto intent = request.render();
    std::string current = intent;
    std::string focus = "- Make the prompt clear, specific and complete.";
    for (int r = 0; r < rounds; ++r) {
        current = c.ask(templates.render("templates/evoke_author.txt",
                                         {{"intent", intent}, {"current_prompt", current}, {"focus", focus}}),
                        "baseline_evoke_author");
        auto critique = c.ask(templates.render("templates/evoke_reviewer.txt", {{"intent", intent}, {"prompt", current}}),
                              "baseline_evoke_reviewer");
        focus = c.ask(templates.render("templates/evoke_selector.txt", {{"intent", intent}, {"critique", critique}}),
                      "baseline_evoke_selector");
    }
    return {Strategy::Evoke, std::move(current), c.calls};
}

StrategyOutcome refine(const UserRequest& request, Gateway& gateway, const TemplateSet& templates,
                       const PipelineOptions& options, const PreferenceStore* store) {
    RefinePipeline pipeline(gateway, templates, options, store);
    auto result = pipeline.run(request);
    return {Strategy::Refine, std::move(result.final.optimized_prompt), result.calls_used};
}

StrategyOutcome run_strategy(Strategy s, const UserRequest& request, Gateway& gateway, const TemplateSet& templates,
                             const StrategyOptions& options) {
    switch (s) {
        case Strategy::Original: return original_transform(request, gateway, templates);
        case Strategy::CoT: return cot(request, gateway, templates);
        case Strategy::Expert: return expert(request, gateway, templates);
        case Strategy::Evoke: return evoke(request, gateway, templates, options.evoke_rounds);
        case Strategy::Refine: return refine(request, gateway, templates, options.pipeline, options.store);
    }
    throw Error(ErrorCode::Validation, "unknown strategy");
}

}  // namespace pforge
