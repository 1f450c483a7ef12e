// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "pforge/gateway.hpp"
#include "pforge/pipeline.hpp"
#include "pforge/schema.hpp"
#include "pforge/templates.hpp"

namespace pforge {

enum class Strategy { Original, CoT, Expert, Evoke, Refine };

const char* to_string(Strategy s);
// Accepts the names printed by to_string; throws Error(Validation) otherwise.
Strategy strategy_from_string(std::string_view s);

// Calls made on the happy path.
int call_budget(Strategy s, int evoke_rounds = 3);

struct StrategyOutcome {
    Strategy strategy = Strategy::Original;
    std::string prompt;
    int calls_used = 0;
};

// Rewrites intent and preferences as a short direct prompt. One call.
StrategyOutcome original_transform(const UserRequest& request, Gateway& gateway, const TemplateSet& templates);

// original_transform plus the step-by-step directive asset. One call.
StrategyOutcome cot(const UserRequest& request, Gateway& gateway, const TemplateSet& templates);

// Persona call, then the task rewrite; the prompt is persona followed by task. Two calls.
StrategyOutcome expert(const UserRequest& request, Gateway& gateway, const TemplateSet& templates);

// Author, reviewer and selector per round; returns the last author draft. 3 x rounds calls.
StrategyOutcome evoke(const UserRequest& request, Gateway& gateway, const TemplateSet& templates, int rounds = 3);

// The three-turn refine pipeline. Three calls without re-asks.
StrategyOutcome refine(const UserRequest& request, Gateway& gateway, const TemplateSet& templates,
                       const PipelineOptions& options = {}, const PreferenceStore* store = nullptr);

struct StrategyOptions {
    int evoke_rounds = 3;
    PipelineOptions pipeline;
    const PreferenceStore* store = nullptr;
};

StrategyOutcome run_strategy(Strategy s, const UserRequest& request, Gateway& gateway, const TemplateSet& templates,
                             const StrategyOptions& options = {});

}  // namespace pforge
