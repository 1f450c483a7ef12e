// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pforge::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_blank(std::string_view s);

// Lowercase, collapse whitespace runs, strip punctuation at both ends.
std::string normalize_key(std::string_view s);

// Lowercased word set; ASCII non-alphanumerics separate words, UTF-8 bytes stay in-word.
std::set<std::string> word_set(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains_placeholder(std::string_view s);

std::string sha256_hex(std::string_view data);

// splitmix64 step; deterministic stream used by the mocks and seeded selection.
std::uint64_t mix64(std::uint64_t x);

class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }
    // Uniform-ish integer in [lo, hi]; bias is irrelevant at these ranges.
    int range(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
    double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

private:
    std::uint64_t state_;
};

std::uint64_t seed_from_hex(std::string_view hex);

}  // namespace pforge::text
