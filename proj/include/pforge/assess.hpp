// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pforge/judge.hpp"
#include "pforge/schema.hpp"

namespace pforge {

struct Assignment {
    std::string task_id;
    std::string participant_id;
    PresentedOrder presented_order = PresentedOrder::AB;
};

struct HumanJudgment {
    std::string participant_id;
    std::string task_id;
    int align_left = 0;
    int quality_left = 0;
    int align_right = 0;
    int quality_right = 0;
    PresentedOrder presented_order = PresentedOrder::AB;
    Winner winner = Winner::Same;  // canonical A/B frame

    // The same scores mapped back to A/B.
    Judgment canonical() const;
};

struct PairView {
    std::string task_id;
    std::string request_text;
    std::string left_text;
    std::string right_text;
    int position = 0;  // 1-based among the participant's assignments
    int total = 0;
};

struct SessionResults {
    CountRow row;
    std::vector<HumanJudgment> judgments;
};

Json to_json(const ComparisonTask& t);
ComparisonTask comparison_task_from_json(const Json& j);
Json to_json(const HumanJudgment& j);
HumanJudgment human_judgment_from_json(const Json& j);

// Human pairwise assessment. Sessions persist as append-only JSONL under data_dir
// (one file per session); an empty data_dir keeps everything in memory.
class AssessService {
public:
    explicit AssessService(std::filesystem::path data_dir = {});

    // Throws Error(Validation) on empty tasks/participants, duplicate ids or an id already in use.
    std::string create_session(const std::vector<ComparisonTask>& tasks, const std::vector<std::string>& participants,
                               std::uint64_t seed, std::optional<std::string> session_id = std::nullopt);

    // nullopt once every assignment is judged.
    std::optional<PairView> next_pair(const std::string& session_id, const std::string& participant_id) const;

    HumanJudgment submit_judgment(const std::string& session_id, const std::string& participant_id,
                                  const std::string& task_id, int align_left, int quality_left, int align_right,
                                  int quality_right);

    SessionResults results(const std::string& session_id) const;
    std::vector<Assignment> assignments(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

private:
    struct Session {
        std::string id;
        std::uint64_t seed = 0;
        std::vector<ComparisonTask> tasks;
        std::vector<std::string> participants;
        std::vector<Assignment> assignments;
        std::vector<HumanJudgment> judgments;
    };

    const Session& session(const std::string& id) const;
    Session& session(const std::string& id);
    void load(const std::filesystem::path& file);
    void append(const Session& s, const Json& line) const;

    std::filesystem::path data_dir_;
    mutable std::mutex mutex_;
    std::map<std::string, Session> sessions_;
};

// Assignment order for a session: presented order drawn per (task, participant) from the seed.
PresentedOrder assigned_order(std::uint64_t seed, const std::string& task_id, const std::string& participant_id);

}  // namespace pforge
