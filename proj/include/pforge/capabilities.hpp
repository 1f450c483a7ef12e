// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pforge {

// Channel order doubles as insertion priority.
enum class CapabilitySource { IntentDerived, TaskRequired, Retrieved };

const char* to_string(CapabilitySource s);

struct CapabilityEntry {
    std::string text;                  // surface text of the first occurrence
    std::set<CapabilitySource> sources;
    std::string norm_key;

    bool operator==(const CapabilityEntry&) const = default;
};

class CapabilitySet {
public:
    const std::vector<CapabilityEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::set<std::string> keys() const;
    const CapabilityEntry* find(std::string_view text) const;

    // Merges one channel's texts; texts that normalize to nothing are skipped.
    void add(const std::vector<std::string>& texts, CapabilitySource source);

private:
    std::vector<CapabilityEntry> entries_;
};

inline constexpr std::size_t kDefaultMaxCapabilities = 20;

CapabilitySet collect(const std::vector<std::string>& intent_derived, const std::vector<std::string>& task_required,
                      const std::vector<std::string>& retrieved);

// "- <text> [sources: a, b]" bullets (at most max_entries, set order) then the
// balancing instruction. Throws Error(Validation) when max_entries is 0.
std::string render_for_prompt(const CapabilitySet& set, std::size_t max_entries = kDefaultMaxCapabilities);

extern const char* const kBalancingInstruction;

}  // namespace pforge
