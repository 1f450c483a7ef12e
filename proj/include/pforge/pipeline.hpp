// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pforge/capabilities.hpp"
#include "pforge/gateway.hpp"
#include "pforge/preference_store.hpp"
#include "pforge/schema.hpp"
#include "pforge/templates.hpp"

namespace pforge {

struct PipelineOptions {
    bool use_preference_store = false;
    int max_parse_retries = 2;  // re-asks allowed per turn
    std::size_t max_capabilities = kDefaultMaxCapabilities;
    std::size_t retrieve_k = kDefaultRetrieveK;
};

// What survives between turns. Raw model output never does.
struct CuratedContext {
    std::string purpose;
    std::string context;
    std::string desired_outcome;
    CapabilitySet capabilities;
    std::string agent_plan;
    std::string initial_prompt;
    std::optional<std::vector<Suggestion>> suggestions;
    std::optional<std::vector<std::string>> optimized_capabilities;
};

CuratedContext curate(const IntentAnalysis& analysis, const std::vector<std::string>& retrieved_capabilities);

// Labeled plain-text sections; suggestions and optimized capabilities appear once set.
std::string render_context(const CuratedContext& ctx, std::size_t max_capabilities = kDefaultMaxCapabilities);

struct TranscriptEntry {
    std::string purpose_tag;
    ChatRequest request;
    std::string response;
};

struct RefinementResult {
    IntentAnalysis analysis;
    OptimizationReport report;
    OptimizedPrompt final;
    std::vector<TranscriptEntry> transcript;
    int calls_used = 0;
    int parse_retries = 0;
    std::vector<ScoredRecord> retrieved;  // preferences and capability notes pulled from the store
};

// Three-turn refinement: intent analysis, optimization suggestions, final prompt.
// A pipeline instance runs one request at a time; use one per concurrent run.
class RefinePipeline {
public:
    RefinePipeline(Gateway gateway, TemplateSet templates, PipelineOptions options = {},
                   const PreferenceStore* store = nullptr);

    RefinementResult run(const UserRequest& request);

    IntentAnalysis turn_analyze(const UserRequest& request, const std::vector<ScoredRecord>& retrieved_prefs);
    OptimizationReport turn_suggest(CuratedContext& ctx);
    OptimizedPrompt turn_finalize(const CuratedContext& ctx);

    const Gateway& gateway() const { return gateway_; }
    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
    int parse_retries() const { return parse_retries_; }

private:
    template <typename T, typename Validate>
    T ask(const std::string& tag, std::vector<ChatMessage> messages, Validate validate);

    std::vector<ChatMessage> with_system(std::string user_content) const;

    Gateway gateway_;
    TemplateSet templates_;
    PipelineOptions options_;
    const PreferenceStore* store_;
    std::vector<TranscriptEntry> transcript_;
    int parse_retries_ = 0;
};

}  // namespace pforge
