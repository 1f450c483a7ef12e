// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pforge/baselines.hpp"
#include "pforge/judge.hpp"

namespace pforge {

struct EvalTask {
    std::string task_id;
    UserRequest request;
};

// JSONL, one {"task_id", "intent", "preferences"?} per line. Missing ids become "task-N".
std::vector<EvalTask> load_eval_tasks(const std::filesystem::path& path);

struct EvalRecord {
    std::string task_id;
    std::string prompt_a;
    std::string prompt_b;
    std::string response_a;
    std::string response_b;
    int calls_a = 0;
    int calls_b = 0;
    std::string error;  // generation failure; the task is then counted as failed
};

struct EvaluateResult {
    SuiteResult suite;
    std::vector<EvalRecord> records;
};

struct EvaluateGateways {
    Gateway& prompter_a;
    Gateway& prompter_b;
    Gateway& target;  // answers each prompt (purpose "respond")
    Gateway& judge;
};

// Both strategies write a prompt per task, the target answers both, the judge compares the answers.
EvaluateResult evaluate(const std::vector<EvalTask>& tasks, Strategy a, Strategy b, EvaluateGateways gateways,
                        const TemplateSet& templates, const StrategyOptions& strategy_options,
                        const JudgeOptions& judge_options, std::string model_label = {});

Json to_json(const EvalRecord& r);

}  // namespace pforge
