// SPDX-License-Identifier: Apache-2.0
#include "pforge/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <deque>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

#include "pforge/text.hpp"

namespace pforge {

UserRequest simulate_intent(Gateway& gateway, const TemplateSet& templates, const Domain& domain, IntentStyle style,
                            std::uint64_t seed) {
    const std::string style_asset = style == IntentStyle::Detailed ? "templates/intent_style_detailed.txt"
                                                                   : "templates/intent_style_underspecified.txt";
    auto user = templates.render("templates/intent_sim_user.txt",
                                 {{"domain_name", domain.name},
                                  {"domain_theme", domain.theme_description},
                                  {"style", to_string(style)},
                                  {"variation", std::to_string(seed)},
                                  {"style_instruction", text::trim(templates.get(style_asset))}});
    auto request = gateway.make_request({ChatMessage{Role::User, std::move(user)}},
                                        gateway.options().generation_temperature);
    request.seed = static_cast<std::int64_t>(seed & 0x7FFFFFFFFFFFFFFFULL);
    const Json payload = parse_payload(gateway.complete(request, "intent_sim"));

    UserRequest out;
    if (!payload.contains("intent") || !payload["intent"].is_string()) throw SchemaError("intent", "missing");
    out.intent_text = text::trim(payload["intent"].get<std::string>());
    if (payload.contains("preferences")) {
        if (!payload["preferences"].is_array()) throw SchemaError("preferences", "expected array");
        for (const auto& p : payload["preferences"]) {
            if (!p.is_string() || text::is_blank(p.get<std::string>())) continue;
            if (out.preferences.size() == 3) break;
            out.preferences.push_back(text::trim(p.get<std::string>()));
        }
    }
    out.domain_hint = domain.id;
    out.validate();
    return out;
}

Dialogue generate_dialogue(const Domain& domain, IntentStyle style, TeacherBackend& teacher,
                           const TemplateSet& templates, std::uint64_t seed, std::string dialogue_id,
                           const PipelineOptions& options) {
    Dialogue d;
    d.dialogue_id = std::move(dialogue_id);
    d.domain = domain.id;
    d.teacher = teacher.label;
    d.intent_style = style;
    d.turn1 = simulate_intent(teacher.gateway, templates, domain, style, seed);

    PipelineOptions opts = options;
    opts.use_preference_store = false;
    RefinePipeline pipeline(teacher.gateway, templates, opts);
    auto result = pipeline.run(d.turn1);
    d.turn2 = std::move(result.analysis);
    d.turn3 = std::move(result.report);
    d.turn4 = std::move(result.final);
    return d;
}

FilterDecision filter_dialogue(const Dialogue& d, Gateway& judge, const TemplateSet& templates, int threshold) {
    auto user = templates.render("templates/filter_user.txt",
                                 {{"intent", d.turn1.render()}, {"optimized_prompt", d.turn4.optimized_prompt}});
    auto request = judge.make_request({ChatMessage{Role::User, std::move(user)}}, judge.options().judge_temperature);
    const Json payload = parse_payload(judge.complete(request, "filter"));

    auto score = [&](const char* key) {
        if (!payload.contains(key) || !payload[key].is_number_integer()) throw SchemaError(key, "expected integer");
        const int v = payload[key].get<int>();
        if (!score_in_range(v)) throw SchemaError(key, "score outside [1,10]");
        return v;
    };
    FilterDecision out;
    out.quality = score("quality");
    out.alignment = score("alignment");
    if (out.quality < threshold) {
        out.keep = false;
        out.reason = "quality " + std::to_string(out.quality) + " < " + std::to_string(threshold);
    } else if (out.alignment < threshold) {
        out.keep = false;
        out.reason = "alignment " + std::to_string(out.alignment) + " < " + std::to_string(threshold);
    }
    return out;
}

// ---------------------------------------------------------------------------

const char* to_string(FilterStatus s) {
    switch (s) {
        case FilterStatus::Kept: return "kept";
        case FilterStatus::Discarded: return "discarded";
        case FilterStatus::Replacement: return "replacement";
    }
    return "kept";
}

const char* to_string(Split s) {
    switch (s) {
        case Split::None: return "none";
        case Split::Train: return "train";
        case Split::Test: return "test";
    }
    return "none";
}

std::size_t DatasetManifest::count(Split s) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [&](const ManifestRecord& r) { return r.split == s; }));
}

std::size_t DatasetManifest::kept() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const ManifestRecord& r) {
        return r.filter_status != FilterStatus::Discarded;
    }));
}

Json DatasetManifest::summary_json() const {
    Json j = Json::object();
    j["kept"] = kept();
    j["train"] = count(Split::Train);
    j["test"] = count(Split::Test);
    Json domains = Json::object();
    for (const auto& [id, c] : by_domain) {
        domains[id] = {{"attempted", c.attempted}, {"kept", c.kept}, {"discarded", c.discarded}, {"abandoned", c.abandoned}};
    }
    j["by_domain"] = std::move(domains);
    Json teachers = Json::object();
    for (const auto& [label, n] : kept_by_teacher) teachers[label] = n;
    j["kept_by_teacher"] = std::move(teachers);
    return j;
}

void DatasetConfig::validate() const {
    if (per_domain_target < 1) throw Error(ErrorCode::Validation, "per_domain_target must be at least 1");
    if (per_domain_test < 0) throw Error(ErrorCode::Validation, "per_domain_test must be >= 0");
    if (per_domain_test > per_domain_target) {
        throw Error(ErrorCode::Validation, "per_domain_test (" + std::to_string(per_domain_test) +
                                               ") exceeds per_domain_target (" + std::to_string(per_domain_target) + ")");
    }
    if (detailed_share < 0.0 || detailed_share > 1.0) throw Error(ErrorCode::Validation, "detailed_share must be in [0,1]");
    if (teacher_plan.empty()) throw Error(ErrorCode::Validation, "teacher_plan is empty");
    double total = 0.0;
    for (const auto& [label, share] : teacher_plan) {
        if (share < 0.0) throw Error(ErrorCode::Validation, "teacher share for '" + label + "' is negative");
        total += share;
    }
    if (total <= 0.0) throw Error(ErrorCode::Validation, "teacher shares sum to zero");
    if (filter_threshold < 1 || filter_threshold > 10) throw Error(ErrorCode::Validation, "filter_threshold must be in [1,10]");
    if (workers < 1) throw Error(ErrorCode::Validation, "workers must be at least 1");
    if (max_rejudge < 0) throw Error(ErrorCode::Validation, "max_rejudge must be >= 0");
    for (const auto& d : domains) {
        if (!DomainRegistry::builtin().contains(d)) throw Error(ErrorCode::Validation, "unknown domain '" + d + "'");
    }
}

std::map<std::string, double> default_teacher_plan(const std::string& primary, const std::vector<std::string>& others) {
    std::map<std::string, double> plan;
    if (others.empty()) {
        plan[primary] = 1.0;
        return plan;
    }
    plan[primary] = kPrimaryTeacherShare;
    for (const auto& o : others) plan[o] = (1.0 - kPrimaryTeacherShare) / static_cast<double>(others.size());
    return plan;
}

namespace {

struct DomainOutcome {
    std::vector<ManifestRecord> records;
    std::vector<Dialogue> dialogues;  // parallel to admitted records
    DomainCounts counts;
    std::exception_ptr error;
};

std::string dialogue_id_for(const std::string& domain, int seq) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05d", seq);
    return domain + "-" + buf;
}

bool is_gateway_failure(const Error& e) {
    return e.code() == ErrorCode::Transport || e.code() == ErrorCode::BackendRefusal ||
           e.code() == ErrorCode::BudgetExceeded;
}

DomainOutcome run_domain(const Domain& domain, const DatasetConfig& config, std::map<std::string, Gateway>& teachers,
                         Gateway& judge, const TemplateSet& templates, const PipelineOptions& options) {
    DomainOutcome out;
    text::SeededStream rng(config.seed ^ text::seed_from_hex(text::sha256_hex(domain.id)));

    std::vector<std::pair<std::string, double>> cumulative;
    double total = 0.0;
    for (const auto& [label, share] : config.teacher_plan) total += share;
    double acc = 0.0;
    for (const auto& [label, share] : config.teacher_plan) {
        acc += share / total;
        cumulative.emplace_back(label, acc);
    }

    const int cap = config.max_attempts_per_domain > 0 ? config.max_attempts_per_domain : 3 * config.per_domain_target;
    int pending_replacements = 0;
    std::deque<std::pair<Dialogue, int>> rejudge;
    auto& counts = out.counts;

    auto admit = [&](Dialogue d, const FilterDecision& decision) {
        ManifestRecord rec{d.dialogue_id, d.domain, d.teacher, d.intent_style, Split::None, FilterStatus::Kept, {}};
        if (decision.keep) {
            if (pending_replacements > 0) {
                rec.filter_status = FilterStatus::Replacement;
                --pending_replacements;
            }
            ++counts.kept;
            out.records.push_back(std::move(rec));
            out.dialogues.push_back(std::move(d));
        } else {
            rec.filter_status = FilterStatus::Discarded;
            rec.filter_reason = decision.reason;
            ++counts.discarded;
            ++pending_replacements;
            out.records.push_back(std::move(rec));
        }
    };

    auto judge_once = [&](Dialogue d, int tries) {
        Gateway judge_run = judge.fork();
        FilterDecision decision;
        try {
            decision = filter_dialogue(d, judge_run, templates, config.filter_threshold);
        } catch (const Error& e) {
            if (is_gateway_failure(e) && tries < config.max_rejudge) {
                rejudge.emplace_back(std::move(d), tries + 1);
            } else {
                ++counts.abandoned;
            }
            return;
        }
        admit(std::move(d), decision);
    };

    int seq = 0;
    while (counts.kept < config.per_domain_target) {
        if (!rejudge.empty()) {
            auto [d, tries] = std::move(rejudge.front());
            rejudge.pop_front();
            judge_once(std::move(d), tries);
            continue;
        }
        if (counts.attempted >= cap) {
            throw Error(ErrorCode::GenerationExhausted,
                        domain.id + ": " + std::to_string(counts.kept) + " of " +
                            std::to_string(config.per_domain_target) + " dialogues kept after " +
                            std::to_string(counts.attempted) + " attempts");
        }
        ++counts.attempted;
        ++seq;
        const IntentStyle style = rng.unit() < config.detailed_share ? IntentStyle::Detailed : IntentStyle::Underspecified;
        const double pick = rng.unit();
        std::string label = cumulative.back().first;
        for (const auto& [l, edge] : cumulative) {
            if (pick < edge) {
                label = l;
                break;
            }
        }
        const std::uint64_t dialogue_seed = rng.next() >> 1;

        TeacherBackend teacher{label, teachers.at(label).fork()};
        Dialogue d;
        try {
            d = generate_dialogue(domain, style, teacher, templates, dialogue_seed, dialogue_id_for(domain.id, seq),
                                  options);
        } catch (const Error&) {
            ++counts.abandoned;
            continue;
        }
        judge_once(std::move(d), 0);
    }
    counts.abandoned += static_cast<int>(rejudge.size());

    // Seeded partial Fisher-Yates over admitted dialogues picks the test split.
    std::vector<std::size_t> admitted;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        if (out.records[i].filter_status != FilterStatus::Discarded) admitted.push_back(i);
    }
    for (std::size_t i = 0; i < admitted.size(); ++i) {
        const auto j = i + static_cast<std::size_t>(rng.next() % (admitted.size() - i));
        std::swap(admitted[i], admitted[j]);
        out.records[admitted[i]].split = i < static_cast<std::size_t>(config.per_domain_test) ? Split::Test : Split::Train;
    }
    return out;
}

}  // namespace

DatasetResult build_dataset(const DatasetConfig& config, std::map<std::string, Gateway>& teachers, Gateway& judge,
                            const TemplateSet& templates, const PipelineOptions& options) {
    config.validate();
    for (const auto& [label, share] : config.teacher_plan) {
        if (!teachers.count(label)) throw Error(ErrorCode::Validation, "no backend for teacher '" + label + "'");
    }
    std::vector<const Domain*> domains;
    if (config.domains.empty()) {
        for (const auto& d : DomainRegistry::builtin().domains()) domains.push_back(&d);
    } else {
        for (const auto& id : config.domains) domains.push_back(&DomainRegistry::builtin().at(id));
    }

    std::vector<DomainOutcome> outcomes(domains.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < domains.size(); i = next++) {
            try {
                outcomes[i] = run_domain(*domains[i], config, teachers, judge, templates, options);
            } catch (...) {
                outcomes[i].error = std::current_exception();
            }
        }
    };
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), domains.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    DatasetResult result;
    for (std::size_t i = 0; i < domains.size(); ++i) {
        auto& o = outcomes[i];
        if (o.error) std::rethrow_exception(o.error);
        result.manifest.by_domain[domains[i]->id] = o.counts;
        std::size_t next_dialogue = 0;
        for (auto& rec : o.records) {
            if (rec.filter_status != FilterStatus::Discarded) {
                ++result.manifest.kept_by_teacher[rec.teacher];
                result.dialogues.push_back(std::move(o.dialogues[next_dialogue++]));
            }
            result.manifest.records.push_back(std::move(rec));
        }
    }
    return result;
}

void write_dataset(const DatasetResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream dataset(dir / "dataset.jsonl");
    for (const auto& d : result.dialogues) dataset << to_json(d).dump() << '\n';
    std::ofstream manifest(dir / "manifest.jsonl");
    for (const auto& r : result.manifest.records) {
        Json j = Json::object();
        j["dialogue_id"] = r.dialogue_id;
        j["domain"] = r.domain;
        j["teacher"] = r.teacher;
        j["intent_style"] = to_string(r.intent_style);
        j["split"] = to_string(r.split);
        j["filter_status"] = to_string(r.filter_status);
        if (!r.filter_reason.empty()) j["filter_reason"] = r.filter_reason;
        manifest << j.dump() << '\n';
    }
    std::ofstream summary(dir / "summary.json");
    summary << result.manifest.summary_json().dump(2) << '\n';
    if (!dataset || !manifest || !summary) throw Error(ErrorCode::Io, "failed writing dataset artifacts to " + dir.string());
}

// ---------------------------------------------------------------------------

void TrainingConfig::apply_overrides(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("training", "expected object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        try {
            if (k == "per_device_batch") per_device_batch = v.get<int>();
            else if (k == "grad_accum") grad_accum = v.get<int>();
            else if (k == "optimizer") optimizer = v.get<std::string>();
            else if (k == "lr") learning_rate = v.get<double>();
            else if (k == "scheduler") scheduler = v.get<std::string>();
            else if (k == "warmup_ratio") warmup_ratio = v.get<double>();
            else if (k == "lora_rank") lora_rank = v.get<int>();
            else if (k == "lora_alpha") lora_alpha = v.get<int>();
            else if (k == "lora_dropout") lora_dropout = v.get<double>();
            else if (k == "epochs") epochs = v.get<int>();
            else throw ConfigError("training." + k, "unknown key");
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("training." + k, "wrong type");
        }
    }
    if (per_device_batch < 1 || grad_accum < 1 || epochs < 1 || lora_rank < 1) {
        throw ConfigError("training", "batch, accumulation, epochs and rank must be positive");
    }
}

Json export_training_config(const TrainingConfig& c) {
    Json j = Json::object();
    j["per_device_batch"] = c.per_device_batch;
    j["grad_accum"] = c.grad_accum;
    j["total_batch"] = c.total_batch();
    j["optimizer"] = c.optimizer;
    j["lr"] = c.learning_rate;
    j["scheduler"] = c.scheduler;
    j["warmup_ratio"] = c.warmup_ratio;
    j["lora_rank"] = c.lora_rank;
    j["lora_alpha"] = c.lora_alpha;
    j["lora_dropout"] = c.lora_dropout;
    j["epochs"] = c.epochs;
    j["chat_template"] = "llama3";
    // Final loss of the reference run; informational only.
    j["reference_training_loss"] = 0.537;
    return j;
}

}  // namespace pforge
