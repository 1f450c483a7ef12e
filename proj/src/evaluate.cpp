// SPDX-License-Identifier: Apache-2.0
#include "pforge/evaluate.hpp"

#include <fstream>

#include "pforge/text.hpp"

namespace pforge {

std::vector<EvalTask> load_eval_tasks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read tasks file " + path.string());
    std::vector<EvalTask> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::is_blank(line)) continue;
        const auto where = path.string() + ":" + std::to_string(lineno);
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Validation, where + ": " + e.what());
        }
        EvalTask t;
        try {
            t.request = user_request_from_json(j.contains("request") ? j["request"] : Json{{"intent_text", j.value("intent", "")},
                                                                                             {"preferences", j.value("preferences", Json::array())}});
            t.request.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::Validation, where + ": " + e.what());
        }
        t.task_id = j.value("task_id", "task-" + std::to_string(out.size() + 1));
        out.push_back(std::move(t));
    }
    if (out.empty()) throw Error(ErrorCode::Validation, path.string() + " contains no tasks");
    return out;
}

namespace {

std::string respond(Gateway& target, const std::string& prompt) {
    auto request = target.make_request({ChatMessage{Role::User, prompt}}, target.options().generation_temperature);
    auto reply = text::trim(target.complete(request, "respond"));
    if (reply.empty()) throw Error(ErrorCode::Validation, "target returned an empty response");
    return reply;
}

}  // namespace

EvaluateResult evaluate(const std::vector<EvalTask>& tasks, Strategy a, Strategy b, EvaluateGateways gateways,
                        const TemplateSet& templates, const StrategyOptions& strategy_options,
                        const JudgeOptions& judge_options, std::string model_label) {
    if (tasks.empty()) throw Error(ErrorCode::Validation, "no tasks to evaluate");
    if (a == b) throw Error(ErrorCode::Validation, "strategies must differ");

    EvaluateResult result;
    std::vector<ComparisonTask> comparisons;
    int failed = 0;
    for (const auto& t : tasks) {
        EvalRecord rec;
        rec.task_id = t.task_id;
        try {
            const auto pa = run_strategy(a, t.request, gateways.prompter_a, templates, strategy_options);
            const auto pb = run_strategy(b, t.request, gateways.prompter_b, templates, strategy_options);
            rec.prompt_a = pa.prompt;
            rec.prompt_b = pb.prompt;
            rec.calls_a = pa.calls_used;
            rec.calls_b = pb.calls_used;
            rec.response_a = respond(gateways.target, pa.prompt);
            rec.response_b = respond(gateways.target, pb.prompt);
            comparisons.push_back({t.task_id, t.request, rec.response_a, rec.response_b, to_string(a), to_string(b)});
        } catch (const Error& e) {
            rec.error = e.what();
            ++failed;
        }
        result.records.push_back(std::move(rec));
    }

    const std::string comparison = std::string(to_string(a)) + " vs " + to_string(b);
    if (comparisons.empty()) {
        result.suite.row.model = std::move(model_label);
        result.suite.row.comparison = comparison;
    } else {
        result.suite = run_comparison_suite(comparisons, gateways.judge, templates, judge_options, std::move(model_label),
                                            comparison);
    }
    result.suite.row.failed += failed;
    return result;
}

Json to_json(const EvalRecord& r) {
    Json j = Json::object();
    j["task_id"] = r.task_id;
    j["prompt_a"] = r.prompt_a;
    j["prompt_b"] = r.prompt_b;
    j["response_a"] = r.response_a;
    j["response_b"] = r.response_b;
    j["calls_a"] = r.calls_a;
    j["calls_b"] = r.calls_b;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

}  // namespace pforge
