// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace pforge {

enum class RecordKind { Preference, CapabilityNote };

const char* to_string(RecordKind k);
RecordKind record_kind_from_string(std::string_view s);

struct PreferenceRecord {
    std::string record_id;
    std::string user_id;
    RecordKind kind = RecordKind::Preference;
    std::string text;
    std::int64_t created_at = 0;  // milliseconds since the Unix epoch

    bool operator==(const PreferenceRecord&) const = default;
};

struct ScoredRecord {
    PreferenceRecord record;
    double score = 0.0;
};

// Scores one stored text against a query; must return a value in [0,1].
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual double score(std::string_view query, std::string_view text) const = 0;
};

// |q ∩ t| / |q ∪ t| over lowercased word sets.
class JaccardRetriever final : public Retriever {
public:
    double score(std::string_view query, std::string_view text) const override;
};

inline constexpr std::size_t kDefaultRetrieveK = 3;

// Append-only JSONL store with an in-memory index rebuilt on open. Reads run
// concurrently; writes are serialized.
class PreferenceStore {
public:
    using Clock = std::function<std::int64_t()>;

    // Empty path keeps the store in memory only.
    explicit PreferenceStore(std::filesystem::path path = {}, std::shared_ptr<const Retriever> retriever = nullptr);

    PreferenceRecord add(const std::string& user_id, RecordKind kind, const std::string& text);

    std::vector<ScoredRecord> retrieve(const std::string& user_id, std::string_view query,
                                       std::size_t k = kDefaultRetrieveK,
                                       std::optional<RecordKind> kind = std::nullopt) const;

    std::vector<PreferenceRecord> records() const;
    void set_clock(Clock clock) { clock_ = std::move(clock); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::shared_ptr<const Retriever> retriever_;
    Clock clock_;
    mutable std::shared_mutex mutex_;
    std::vector<PreferenceRecord> records_;
    std::uint64_t next_seq_ = 1;
};

}  // namespace pforge
