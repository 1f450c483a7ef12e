// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pforge/domains.hpp"
#include "pforge/gateway.hpp"
#include "pforge/pipeline.hpp"
#include "pforge/schema.hpp"
#include "pforge/templates.hpp"

namespace pforge {

// ---------------------------------------------------------------------------
// Intent simulation and dialogue generation

UserRequest simulate_intent(Gateway& gateway, const TemplateSet& templates, const Domain& domain, IntentStyle style,
                            std::uint64_t seed);

struct TeacherBackend {
    std::string label;
    Gateway gateway;
};

// Turn 1 from simulate_intent, turns 2-4 from the refine pipeline, all on the teacher.
Dialogue generate_dialogue(const Domain& domain, IntentStyle style, TeacherBackend& teacher,
                           const TemplateSet& templates, std::uint64_t seed, std::string dialogue_id,
                           const PipelineOptions& options = {});

struct FilterDecision {
    bool keep = true;
    std::string reason;  // empty when kept
    int quality = 0;
    int alignment = 0;
};

inline constexpr int kDefaultFilterThreshold = 6;

// One judge call rating the final prompt; keeps iff both scores reach the threshold.
FilterDecision filter_dialogue(const Dialogue& d, Gateway& judge, const TemplateSet& templates,
                               int threshold = kDefaultFilterThreshold);

// ---------------------------------------------------------------------------
// Dataset build

enum class FilterStatus { Kept, Discarded, Replacement };
enum class Split { None, Train, Test };

const char* to_string(FilterStatus s);
const char* to_string(Split s);

struct ManifestRecord {
    std::string dialogue_id;
    std::string domain;
    std::string teacher;
    IntentStyle intent_style = IntentStyle::Detailed;
    Split split = Split::None;
    FilterStatus filter_status = FilterStatus::Kept;
    std::string filter_reason;

    bool operator==(const ManifestRecord&) const = default;
};

struct DomainCounts {
    int attempted = 0;
    int kept = 0;
    int discarded = 0;
    int abandoned = 0;

    bool operator==(const DomainCounts&) const = default;
};

struct DatasetManifest {
    std::vector<ManifestRecord> records;
    std::map<std::string, DomainCounts> by_domain;
    std::map<std::string, int> kept_by_teacher;

    bool operator==(const DatasetManifest&) const = default;

    std::size_t count(Split s) const;
    std::size_t kept() const;
    Json summary_json() const;
};

struct DatasetConfig {
    int per_domain_target = 300;
    int per_domain_test = 10;
    double detailed_share = 0.5;
    // label -> share; normalized internally.
    std::map<std::string, double> teacher_plan;
    std::uint64_t seed = 42;
    int filter_threshold = kDefaultFilterThreshold;
    int max_attempts_per_domain = 0;  // 0 means 3 x per_domain_target
    int max_rejudge = 2;
    int workers = 4;
    std::vector<std::string> domains;  // empty means all 41

    // Throws Error(Validation).
    void validate() const;
};

// Share of the primary teacher in the reference corpus (8,200 of 12,300 dialogues).
inline constexpr double kPrimaryTeacherShare = 8200.0 / 12300.0;

// Primary teacher gets kPrimaryTeacherShare; the rest split evenly.
std::map<std::string, double> default_teacher_plan(const std::string& primary, const std::vector<std::string>& others);

struct DatasetResult {
    DatasetManifest manifest;
    std::vector<Dialogue> dialogues;  // admitted dialogues, manifest order
};

DatasetResult build_dataset(const DatasetConfig& config, std::map<std::string, Gateway>& teachers, Gateway& judge,
                            const TemplateSet& templates, const PipelineOptions& options = {});

// Writes dataset.jsonl, manifest.jsonl and summary.json under dir.
void write_dataset(const DatasetResult& result, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Chat export

struct ChatTemplate {
    std::string name;
    std::string begin;
    std::string message;  // must contain {role} and {content}
    std::string separator;
    std::string end;
    std::map<std::string, std::string> roles;

    // Throws Error(Template) on unknown placeholders or a malformed message pattern.
    static ChatTemplate from_json(const nlohmann::json& j);
    static ChatTemplate load(const TemplateSet& templates, const std::string& name);
};

// user(intent) / assistant(turn 2) / user(fixed) / assistant(turn 3) / user(fixed) / assistant(turn 4).
std::vector<ChatMessage> dialogue_messages(const Dialogue& d, const TemplateSet& templates);

std::string export_chat_format(const Dialogue& d, const ChatTemplate& tmpl, const TemplateSet& templates);
std::string render_chat(const std::vector<ChatMessage>& messages, const ChatTemplate& tmpl);

// Inverse of render_chat for an alternating user/assistant transcript.
std::vector<ChatMessage> parse_chat_export(std::string_view text, const ChatTemplate& tmpl);

// Canonical pretty JSON used for assistant turns in exports.
std::string canonical_payload(const Json& j);

// ---------------------------------------------------------------------------
// Fine-tuning configuration

struct TrainingConfig {
    int per_device_batch = 8;
    int grad_accum = 4;
    std::string optimizer = "adamw-8bit";
    double learning_rate = 4e-5;
    std::string scheduler = "constant_with_warmup";
    double warmup_ratio = 0.05;
    int lora_rank = 32;
    int lora_alpha = 64;
    double lora_dropout = 0.05;
    int epochs = 2;

    int total_batch() const { return per_device_batch * grad_accum; }
    // Applies known keys from j; unknown keys throw ConfigError.
    void apply_overrides(const nlohmann::json& j);
};

Json export_training_config(const TrainingConfig& config = {});

}  // namespace pforge
