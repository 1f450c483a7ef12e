// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pforge/gateway.hpp"
#include "pforge/schema.hpp"
#include "pforge/templates.hpp"

namespace pforge {

struct ComparisonTask {
    std::string task_id;
    UserRequest request;
    std::string response_a;
    std::string response_b;
    std::string label_a;
    std::string label_b;

    // Throws Error(Validation).
    void validate() const;
};

inline constexpr int kDefaultBaseTrials = 5;
inline constexpr int kDefaultMaxExtraRounds = 4;

struct JudgeOptions {
    int base_trials = kDefaultBaseTrials;
    int max_extra_rounds = kDefaultMaxExtraRounds;
    int max_parse_retries = 2;
    int parallelism = 4;
    std::uint64_t seed = 7;
};

// Scores the pair once with the responses shown in `order`. Strategy labels are never sent.
// Re-asks on unparseable output; throws Error(JudgeParse) once retries run out.
Judgment judge_once(const ComparisonTask& task, Gateway& judge, const TemplateSet& templates, PresentedOrder order,
                    int max_parse_retries = 2, std::optional<std::int64_t> seed = std::nullopt);

// Winner that occurs strictly more often than any other, if there is one.
std::optional<Winner> unique_mode(const std::vector<Winner>& winners);

Verdict aggregate(const std::function<Judgment()>& trial_source, int base_trials = kDefaultBaseTrials,
                  int max_extra_rounds = kDefaultMaxExtraRounds);

// Judge trials for one task with a per-trial seeded A/B order.
Verdict judge_task(const ComparisonTask& task, Gateway& judge, const TemplateSet& templates, const JudgeOptions& options);

struct CountRow {
    std::string model;
    std::string comparison;
    int first_better = 0;
    int second_better = 0;
    int same = 0;
    int failed = 0;

    int judged() const { return first_better + second_better + same; }
    void add(Winner w);
    bool operator==(const CountRow&) const = default;
};

struct CountTable {
    std::vector<CountRow> rows;

    std::string to_text() const;
    std::string to_csv() const;
};

struct TaskVerdict {
    std::string task_id;
    std::string label_a;
    std::string label_b;
    std::optional<Verdict> verdict;
    std::string error;  // set when verdict is empty
};

struct SuiteResult {
    CountRow row;
    std::vector<TaskVerdict> verdicts;  // input order
};

// Throws Error(Validation) on an empty task list; per-task failures land in row.failed.
SuiteResult run_comparison_suite(const std::vector<ComparisonTask>& tasks, Gateway& judge, const TemplateSet& templates,
                                 const JudgeOptions& options, std::string model = {}, std::string comparison = {});

Json to_json(const TaskVerdict& v);
void write_verdicts(const std::vector<TaskVerdict>& verdicts, const std::filesystem::path& path);

}  // namespace pforge
