// SPDX-License-Identifier: Apache-2.0
#include "pforge/capabilities.hpp"

#include <algorithm>

#include "pforge/errors.hpp"
#include "pforge/text.hpp"

namespace pforge {

const char* const kBalancingInstruction =
    "Balance the capabilities above: keep those the user stated or implied, add the ones the task requires, "
    "and weigh retrieved ones from earlier tasks only where they fit this request.";

const char* to_string(CapabilitySource s) {
    switch (s) {
        case CapabilitySource::IntentDerived: return "intent-derived";
        case CapabilitySource::TaskRequired: return "task-required";
        case CapabilitySource::Retrieved: return "retrieved";
    }
    return "unknown";
}

std::set<std::string> CapabilitySet::keys() const {
    std::set<std::string> out;
    for (const auto& e : entries_) out.insert(e.norm_key);
    return out;
}

const CapabilityEntry* CapabilitySet::find(std::string_view t) const {
    const auto key = text::normalize_key(t);
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const CapabilityEntry& e) { return e.norm_key == key; });
    return it == entries_.end() ? nullptr : &*it;
}

void CapabilitySet::add(const std::vector<std::string>& texts, CapabilitySource source) {
    for (const auto& t : texts) {
        auto key = text::normalize_key(t);
        if (key.empty()) continue;
        auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const CapabilityEntry& e) { return e.norm_key == key; });
        if (it != entries_.end()) {
            it->sources.insert(source);
        } else {
            entries_.push_back(CapabilityEntry{text::trim(t), {source}, std::move(key)});
        }
    }
}

CapabilitySet collect(const std::vector<std::string>& intent_derived, const std::vector<std::string>& task_required,
                      const std::vector<std::string>& retrieved) {
    CapabilitySet set;
    set.add(intent_derived, CapabilitySource::IntentDerived);
    set.add(task_required, CapabilitySource::TaskRequired);
    set.add(retrieved, CapabilitySource::Retrieved);
    return set;
}

std::string render_for_prompt(const CapabilitySet& set, std::size_t max_entries) {
    if (max_entries == 0) throw Error(ErrorCode::Validation, "max_entries must be at least 1");
    std::string out;
    const std::size_t n = std::min(max_entries, set.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = set.entries()[i];
        std::vector<std::string> names;
        for (auto s : e.sources) names.emplace_back(to_string(s));
        out += "- " + e.text + " [sources: " + text::join(names, ", ") + "]\n";
    }
    out += kBalancingInstruction;
    return out;
}

}  // namespace pforge
