// SPDX-License-Identifier: Apache-2.0
#include "pforge/assess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <utility>

#include "pforge/text.hpp"

namespace pforge {

Judgment HumanJudgment::canonical() const {
    return Judgment::from_presented(align_left, quality_left, align_right, quality_right, presented_order);
}

Json to_json(const ComparisonTask& t) {
    Json j = Json::object();
    j["task_id"] = t.task_id;
    j["request"] = to_json(t.request);
    j["response_a"] = t.response_a;
    j["response_b"] = t.response_b;
    j["label_a"] = t.label_a;
    j["label_b"] = t.label_b;
    return j;
}

namespace {

std::string str_field(const Json& j, const char* key, bool required = true) {
    if (!j.contains(key)) {
        if (required) throw SchemaError(key, "missing");
        return {};
    }
    if (!j[key].is_string()) throw SchemaError(key, "expected string");
    return j[key].get<std::string>();
}

int int_field(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) throw SchemaError(key, "expected integer");
    return j[key].get<int>();
}

}  // namespace

ComparisonTask comparison_task_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("$", "expected object");
    ComparisonTask t;
    t.task_id = str_field(j, "task_id");
    if (j.contains("request")) {
        t.request = user_request_from_json(j["request"]);
    } else {
        t.request.intent_text = str_field(j, "intent");
        if (j.contains("preferences")) {
            if (!j["preferences"].is_array()) throw SchemaError("preferences", "expected array");
            for (const auto& p : j["preferences"]) {
                if (!p.is_string()) throw SchemaError("preferences", "expected strings");
                t.request.preferences.push_back(p.get<std::string>());
            }
        }
    }
    t.response_a = str_field(j, "response_a");
    t.response_b = str_field(j, "response_b");
    t.label_a = str_field(j, "label_a", false);
    t.label_b = str_field(j, "label_b", false);
    if (t.label_a.empty()) t.label_a = "A";
    if (t.label_b.empty()) t.label_b = "B";
    return t;
}

Json to_json(const HumanJudgment& h) {
    Json j = Json::object();
    j["participant_id"] = h.participant_id;
    j["task_id"] = h.task_id;
    j["align_left"] = h.align_left;
    j["quality_left"] = h.quality_left;
    j["align_right"] = h.align_right;
    j["quality_right"] = h.quality_right;
    j["presented_order"] = to_string(h.presented_order);
    j["winner"] = static_cast<int>(h.winner);
    return j;
}

HumanJudgment human_judgment_from_json(const Json& j) {
    HumanJudgment h;
    h.participant_id = str_field(j, "participant_id");
    h.task_id = str_field(j, "task_id");
    h.align_left = int_field(j, "align_left");
    h.quality_left = int_field(j, "quality_left");
    h.align_right = int_field(j, "align_right");
    h.quality_right = int_field(j, "quality_right");
    h.presented_order = presented_order_from_string(str_field(j, "presented_order"));
    const int w = int_field(j, "winner");
    if (w < 0 || w > 2) throw SchemaError("winner", "expected 0, 1 or 2");
    h.winner = static_cast<Winner>(w);
    return h;
}

PresentedOrder assigned_order(std::uint64_t seed, const std::string& task_id, const std::string& participant_id) {
    text::SeededStream rng(seed ^ text::seed_from_hex(text::sha256_hex(task_id + "\n" + participant_id)));
    return (rng.next() & 1U) ? PresentedOrder::BA : PresentedOrder::AB;
}

AssessService::AssessService(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {
    if (data_dir_.empty()) return;
    std::filesystem::create_directories(data_dir_);
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(data_dir_)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load(f);
}

void AssessService::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::string line;
    std::optional<Session> s;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::is_blank(line)) continue;
        try {
            const Json j = Json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "session") {
                s.emplace();
                s->id = j.at("session_id").get<std::string>();
                s->seed = j.at("seed").get<std::uint64_t>();
                for (const auto& t : j.at("tasks")) s->tasks.push_back(comparison_task_from_json(t));
                for (const auto& p : j.at("participants")) s->participants.push_back(p.get<std::string>());
                for (const auto& a : j.at("assignments")) {
                    s->assignments.push_back({a.at("task_id").get<std::string>(), a.at("participant_id").get<std::string>(),
                                              presented_order_from_string(a.at("presented_order").get<std::string>())});
                }
            } else if (type == "judgment" && s) {
                s->judgments.push_back(human_judgment_from_json(j.at("judgment")));
            }
        } catch (const std::exception& e) {
            throw Error(ErrorCode::Storage, file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (s) {
        auto id = s->id;
        sessions_[id] = std::move(*s);
    }
}

void AssessService::append(const Session& s, const Json& line) const {
    if (data_dir_.empty()) return;
    std::ofstream out(data_dir_ / (s.id + ".jsonl"), std::ios::app);
    out << line.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::Storage, "failed appending to session " + s.id);
}

const AssessService::Session& AssessService::session(const std::string& id) const {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
    return it->second;
}

AssessService::Session& AssessService::session(const std::string& id) {
    return const_cast<Session&>(std::as_const(*this).session(id));
}

namespace {

bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_'; });
}

}  // namespace

std::string AssessService::create_session(const std::vector<ComparisonTask>& tasks,
                                          const std::vector<std::string>& participants, std::uint64_t seed,
                                          std::optional<std::string> session_id) {
    if (tasks.empty()) throw Error(ErrorCode::Validation, "session needs at least one task");
    if (participants.empty()) throw Error(ErrorCode::Validation, "session needs at least one participant");
    std::set<std::string> seen;
    for (const auto& t : tasks) {
        t.validate();
        if (!seen.insert(t.task_id).second) throw Error(ErrorCode::Validation, "duplicate task_id '" + t.task_id + "'");
    }
    seen.clear();
    for (const auto& p : participants) {
        if (!valid_id(p)) throw Error(ErrorCode::Validation, "invalid participant id '" + p + "'");
        if (!seen.insert(p).second) throw Error(ErrorCode::Validation, "duplicate participant '" + p + "'");
    }

    std::lock_guard lock(mutex_);
    Session s;
    if (session_id) {
        if (!valid_id(*session_id)) throw Error(ErrorCode::Validation, "invalid session id '" + *session_id + "'");
        if (sessions_.count(*session_id)) throw Error(ErrorCode::Validation, "session '" + *session_id + "' already exists");
        s.id = *session_id;
    } else {
        std::string basis = std::to_string(seed);
        for (const auto& t : tasks) basis += "\n" + t.task_id;
        for (const auto& p : participants) basis += "\n" + p;
        const auto stem = "s-" + text::sha256_hex(basis).substr(0, 12);
        s.id = stem;
        for (int n = 2; sessions_.count(s.id); ++n) s.id = stem + "-" + std::to_string(n);
    }
    s.seed = seed;
    s.tasks = tasks;
    s.participants = participants;
    for (const auto& p : participants) {
        for (const auto& t : tasks) s.assignments.push_back({t.task_id, p, assigned_order(seed, t.task_id, p)});
    }

    Json line = Json::object();
    line["type"] = "session";
    line["session_id"] = s.id;
    line["seed"] = seed;
    line["tasks"] = Json::array();
    for (const auto& t : tasks) line["tasks"].push_back(to_json(t));
    line["participants"] = participants;
    line["assignments"] = Json::array();
    for (const auto& a : s.assignments) {
        line["assignments"].push_back(
            {{"task_id", a.task_id}, {"participant_id", a.participant_id}, {"presented_order", to_string(a.presented_order)}});
    }
    append(s, line);
    auto id = s.id;
    sessions_.emplace(id, std::move(s));
    return id;
}

std::optional<PairView> AssessService::next_pair(const std::string& session_id, const std::string& participant_id) const {
    std::lock_guard lock(mutex_);
    const auto& s = session(session_id);
    if (std::find(s.participants.begin(), s.participants.end(), participant_id) == s.participants.end()) {
        throw Error(ErrorCode::UnknownParticipant, "unknown participant '" + participant_id + "'");
    }
    int position = 0;
    int total = 0;
    for (const auto& a : s.assignments) total += a.participant_id == participant_id;
    for (const auto& a : s.assignments) {
        if (a.participant_id != participant_id) continue;
        ++position;
        const bool judged = std::any_of(s.judgments.begin(), s.judgments.end(), [&](const HumanJudgment& h) {
            return h.participant_id == participant_id && h.task_id == a.task_id;
        });
        if (judged) continue;
        const auto& task = *std::find_if(s.tasks.begin(), s.tasks.end(),
                                         [&](const ComparisonTask& t) { return t.task_id == a.task_id; });
        const bool ba = a.presented_order == PresentedOrder::BA;
        return PairView{task.task_id, task.request.render(), ba ? task.response_b : task.response_a,
                        ba ? task.response_a : task.response_b, position, total};
    }
    return std::nullopt;
}

HumanJudgment AssessService::submit_judgment(const std::string& session_id, const std::string& participant_id,
                                             const std::string& task_id, int align_left, int quality_left,
                                             int align_right, int quality_right) {
    for (int v : {align_left, quality_left, align_right, quality_right}) {
        if (!score_in_range(v)) throw Error(ErrorCode::OutOfRangeScore, "score " + std::to_string(v) + " outside [1,10]");
    }
    std::lock_guard lock(mutex_);
    auto& s = session(session_id);
    if (std::find(s.participants.begin(), s.participants.end(), participant_id) == s.participants.end()) {
        throw Error(ErrorCode::UnknownParticipant, "unknown participant '" + participant_id + "'");
    }
    const auto a = std::find_if(s.assignments.begin(), s.assignments.end(), [&](const Assignment& x) {
        return x.participant_id == participant_id && x.task_id == task_id;
    });
    if (a == s.assignments.end()) throw Error(ErrorCode::Validation, "task '" + task_id + "' is not assigned to " + participant_id);
    const bool judged = std::any_of(s.judgments.begin(), s.judgments.end(), [&](const HumanJudgment& h) {
        return h.participant_id == participant_id && h.task_id == task_id;
    });
    if (judged) throw Error(ErrorCode::DuplicateJudgment, participant_id + " already judged '" + task_id + "'");

    HumanJudgment h{participant_id, task_id, align_left, quality_left, align_right, quality_right, a->presented_order,
                    Winner::Same};
    h.winner = h.canonical().winner();
    append(s, Json{{"type", "judgment"}, {"judgment", to_json(h)}});
    s.judgments.push_back(h);
    return h;
}

SessionResults AssessService::results(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    const auto& s = session(session_id);
    SessionResults r;
    r.row.model = "human";
    r.row.comparison = s.id;
    for (const auto& h : s.judgments) r.row.add(h.winner);
    r.judgments = s.judgments;
    return r;
}

std::vector<Assignment> AssessService::assignments(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    return session(session_id).assignments;
}

std::vector<std::string> AssessService::session_ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
}

}  // namespace pforge
