// SPDX-License-Identifier: Apache-2.0
#include "pforge/judge.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "pforge/text.hpp"

namespace pforge {

void ComparisonTask::validate() const {
    if (text::is_blank(task_id)) throw Error(ErrorCode::Validation, "task_id is empty");
    if (text::is_blank(response_a)) throw Error(ErrorCode::Validation, task_id + ": response_a is empty");
    if (text::is_blank(response_b)) throw Error(ErrorCode::Validation, task_id + ": response_b is empty");
    if (label_a == label_b) throw Error(ErrorCode::Validation, task_id + ": labels must differ");
    request.validate();
}

namespace {

int score_field(const Json& payload, const char* key) {
    if (!payload.contains(key) || !payload[key].is_number_integer()) throw SchemaError(key, "expected integer");
    const int v = payload[key].get<int>();
    if (!score_in_range(v)) throw SchemaError(key, "score " + std::to_string(v) + " outside [1,10]");
    return v;
}

}  // namespace

Judgment judge_once(const ComparisonTask& task, Gateway& judge, const TemplateSet& templates, PresentedOrder order,
                    int max_parse_retries, std::optional<std::int64_t> seed) {
    const bool swapped = order == PresentedOrder::BA;
    std::vector<ChatMessage> messages{
        {Role::System, templates.get("templates/judge_system.txt")},
        {Role::User, templates.render("templates/judge_user.txt",
                                      {{"intent", task.request.render()},
                                       {"response_a", swapped ? task.response_b : task.response_a},
                                       {"response_b", swapped ? task.response_a : task.response_b}})}};
    for (int attempt = 1;; ++attempt) {
        auto request = judge.make_request(messages, judge.options().judge_temperature);
        if (seed) request.seed = seed;
        const std::string reply = judge.complete(request, "judge");
        try {
            const Json payload = parse_payload(reply);
            const int al = score_field(payload, "align_a");
            const int ql = score_field(payload, "quality_a");
            const int ar = score_field(payload, "align_b");
            const int qr = score_field(payload, "quality_b");
            std::string rationale;
            if (payload.contains("rationale") && payload["rationale"].is_string()) rationale = payload["rationale"].get<std::string>();
            // Any "winner" the model volunteers is ignored.
            return Judgment::from_presented(al, ql, ar, qr, order, std::move(rationale));
        } catch (const SchemaError& e) {
            if (attempt > max_parse_retries) {
                throw Error(ErrorCode::JudgeParse, task.task_id + ": judge output unusable after " +
                                                       std::to_string(attempt) + " attempts: " + e.what());
            }
            messages.push_back({Role::Assistant, text::is_blank(reply) ? std::string("(empty reply)") : reply});
            messages.push_back({Role::User, templates.render("templates/reask.txt", {{"error", e.what()}})});
        }
    }
}

std::optional<Winner> unique_mode(const std::vector<Winner>& winners) {
    std::array<int, 3> counts{};
    for (auto w : winners) ++counts[static_cast<int>(w)];
    const int top = *std::max_element(counts.begin(), counts.end());
    if (top == 0 || std::count(counts.begin(), counts.end(), top) != 1) return std::nullopt;
    return static_cast<Winner>(std::find(counts.begin(), counts.end(), top) - counts.begin());
}

Verdict aggregate(const std::function<Judgment()>& trial_source, int base_trials, int max_extra_rounds) {
    if (base_trials < 1) throw Error(ErrorCode::Validation, "base_trials must be at least 1");
    if (max_extra_rounds < 0) throw Error(ErrorCode::Validation, "max_extra_rounds must be >= 0");
    Verdict v;
    std::vector<Winner> winners;
    auto trial = [&] {
        v.trials.push_back(trial_source());
        winners.push_back(v.trials.back().winner());
    };
    for (int i = 0; i < base_trials; ++i) trial();
    auto mode = unique_mode(winners);
    while (!mode && v.extra_rounds < max_extra_rounds) {
        ++v.extra_rounds;
        trial();
        mode = unique_mode(winners);
    }
    v.winner = mode.value_or(Winner::Same);
    return v;
}

Verdict judge_task(const ComparisonTask& task, Gateway& judge, const TemplateSet& templates, const JudgeOptions& options) {
    task.validate();
    text::SeededStream rng(options.seed ^ text::seed_from_hex(text::sha256_hex(task.task_id)));
    return aggregate(
        [&] {
            const auto order = (rng.next() & 1U) ? PresentedOrder::BA : PresentedOrder::AB;
            const auto seed = static_cast<std::int64_t>(rng.next() >> 1);
            return judge_once(task, judge, templates, order, options.max_parse_retries, seed);
        },
        options.base_trials, options.max_extra_rounds);
}

void CountRow::add(Winner w) {
    switch (w) {
        case Winner::FirstBetter: ++first_better; break;
        case Winner::SecondBetter: ++second_better; break;
        case Winner::Same: ++same; break;
    }
}

std::string CountTable::to_text() const {
    const std::vector<std::string> header{"model", "comparison", "first_better", "second_better", "same", "failed"};
    std::vector<std::vector<std::string>> cells{header};
    for (const auto& r : rows) {
        cells.push_back({r.model, r.comparison, std::to_string(r.first_better), std::to_string(r.second_better),
                         std::to_string(r.same), std::to_string(r.failed)});
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    std::string out;
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto pad = std::string(width[i] - row[i].size(), ' ');
            line += i < 2 ? row[i] + pad : pad + row[i];  // numbers right-aligned
            if (i + 1 < row.size()) line += "  ";
        }
        out += line.substr(0, line.find_last_not_of(' ') + 1) + '\n';
    }
    return out;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string CountTable::to_csv() const {
    std::string out = "model,comparison,first_better,second_better,same,failed\n";
    for (const auto& r : rows) {
        out += csv_field(r.model) + "," + csv_field(r.comparison) + "," + std::to_string(r.first_better) + "," +
               std::to_string(r.second_better) + "," + std::to_string(r.same) + "," + std::to_string(r.failed) + "\n";
    }
    return out;
}

SuiteResult run_comparison_suite(const std::vector<ComparisonTask>& tasks, Gateway& judge, const TemplateSet& templates,
                                 const JudgeOptions& options, std::string model, std::string comparison) {
    if (tasks.empty()) throw Error(ErrorCode::Validation, "comparison suite needs at least one task");
    if (options.parallelism < 1) throw Error(ErrorCode::Validation, "parallelism must be at least 1");

    SuiteResult result;
    result.row.model = std::move(model);
    result.row.comparison = std::move(comparison);
    result.verdicts.resize(tasks.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            auto& out = result.verdicts[i];
            out.task_id = tasks[i].task_id;
            out.label_a = tasks[i].label_a;
            out.label_b = tasks[i].label_b;
            try {
                out.verdict = judge_task(tasks[i], judge, templates, options);
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        }
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(options.parallelism), tasks.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& v : result.verdicts) {
        if (v.verdict) result.row.add(v.verdict->winner);
        else ++result.row.failed;
    }
    return result;
}

Json to_json(const TaskVerdict& v) {
    Json j = Json::object();
    j["task_id"] = v.task_id;
    j["label_a"] = v.label_a;
    j["label_b"] = v.label_b;
    if (v.verdict) j["verdict"] = to_json(*v.verdict);
    else j["error"] = v.error;
    return j;
}

void write_verdicts(const std::vector<TaskVerdict>& verdicts, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    for (const auto& v : verdicts) out << to_json(v).dump() << '\n';
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace pforge
