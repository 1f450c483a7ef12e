// SPDX-License-Identifier: Apache-2.0
#include "pforge/preference_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>

#include "json.hpp"
#include "pforge/errors.hpp"
#include "pforge/text.hpp"

namespace pforge {

namespace {

std::string format_id(std::uint64_t seq) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rec-%08llu", static_cast<unsigned long long>(seq));
    return buf;
}

std::uint64_t id_sequence(const std::string& id) {
    if (id.rfind("rec-", 0) != 0) return 0;
    try {
        return std::stoull(id.substr(4));
    } catch (const std::exception&) {
        return 0;
    }
}

}  // namespace

const char* to_string(RecordKind k) { return k == RecordKind::Preference ? "preference" : "capability_note"; }

RecordKind record_kind_from_string(std::string_view s) {
    if (s == "preference") return RecordKind::Preference;
    if (s == "capability_note") return RecordKind::CapabilityNote;
    throw Error(ErrorCode::Validation, "unknown record kind '" + std::string(s) + "'");
}

double JaccardRetriever::score(std::string_view query, std::string_view t) const {
    const auto q = text::word_set(query);
    const auto d = text::word_set(t);
    std::size_t inter = 0;
    for (const auto& w : q) inter += d.count(w);
    const std::size_t uni = q.size() + d.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

PreferenceStore::PreferenceStore(std::filesystem::path path, std::shared_ptr<const Retriever> retriever)
    : path_(std::move(path)),
      retriever_(retriever ? std::move(retriever) : std::make_shared<JaccardRetriever>()),
      clock_([] {
          return std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::system_clock::now().time_since_epoch())
              .count();
      }) {
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    if (!in) throw Error(ErrorCode::Storage, "cannot open preference store " + path_.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            PreferenceRecord r{j.at("record_id").get<std::string>(), j.at("user_id").get<std::string>(),
                               record_kind_from_string(j.at("kind").get<std::string>()),
                               j.at("text").get<std::string>(), j.at("created_at").get<std::int64_t>()};
            next_seq_ = std::max(next_seq_, id_sequence(r.record_id) + 1);
            records_.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw Error(ErrorCode::Storage,
                        path_.string() + ":" + std::to_string(line_no) + ": corrupt record: " + e.what());
        }
    }
}

PreferenceRecord PreferenceStore::add(const std::string& user_id, RecordKind kind, const std::string& t) {
    if (text::is_blank(t)) throw Error(ErrorCode::InvalidText, "preference text is empty");
    if (text::is_blank(user_id)) throw Error(ErrorCode::InvalidText, "user_id is empty");
    std::unique_lock lock(mutex_);
    PreferenceRecord r{format_id(next_seq_), user_id, kind, t, clock_()};
    if (!path_.empty()) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        std::ofstream out(path_, std::ios::app);
        nlohmann::json j{{"record_id", r.record_id},
                         {"user_id", r.user_id},
                         {"kind", to_string(r.kind)},
                         {"text", r.text},
                         {"created_at", r.created_at}};
        out << j.dump() << '\n';
        out.flush();
        if (!out) throw Error(ErrorCode::Storage, "failed to append to " + path_.string());
    }
    ++next_seq_;
    records_.push_back(r);
    return r;
}

std::vector<ScoredRecord> PreferenceStore::retrieve(const std::string& user_id, std::string_view query, std::size_t k,
                                                    std::optional<RecordKind> kind) const {
    if (k == 0) throw Error(ErrorCode::Validation, "k must be at least 1");
    std::shared_lock lock(mutex_);
    std::vector<ScoredRecord> hits;
    for (const auto& r : records_) {
        if (r.user_id != user_id) continue;
        if (kind && r.kind != *kind) continue;
        const double s = retriever_->score(query, r.text);
        if (s > 0.0) hits.push_back({r, s});
    }
    std::sort(hits.begin(), hits.end(), [](const ScoredRecord& a, const ScoredRecord& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.record.created_at != b.record.created_at) return a.record.created_at > b.record.created_at;
        return a.record.record_id < b.record.record_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

std::vector<PreferenceRecord> PreferenceStore::records() const {
    std::shared_lock lock(mutex_);
    return records_;
}

}  // namespace pforge
