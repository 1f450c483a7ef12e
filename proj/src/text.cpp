// SPDX-License-Identifier: Apache-2.0
#include "pforge/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <regex>

#include "pforge/errors.hpp"

namespace pforge {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Schema: return "SchemaError";
        case ErrorCode::Cardinality: return "CardinalityError";
        case ErrorCode::Transport: return "TransportError";
        case ErrorCode::BackendRefusal: return "BackendRefusal";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::UnknownPurpose: return "UnknownPurpose";
        case ErrorCode::TurnParse: return "TurnParseError";
        case ErrorCode::MissingSuggestions: return "MissingSuggestions";
        case ErrorCode::Template: return "TemplateError";
        case ErrorCode::Storage: return "StorageError";
        case ErrorCode::InvalidText: return "InvalidText";
        case ErrorCode::GenerationExhausted: return "GenerationExhausted";
        case ErrorCode::Validation: return "ValidationError";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::UnknownParticipant: return "UnknownParticipant";
        case ErrorCode::OutOfRangeScore: return "OutOfRangeScore";
        case ErrorCode::DuplicateJudgment: return "DuplicateJudgment";
        case ErrorCode::JudgeParse: return "JudgeParseError";
        case ErrorCode::Config: return "ConfigError";
        case ErrorCode::Io: return "IoError";
    }
    return "Error";
}

}  // namespace pforge

namespace pforge::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) != 0;
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

std::string normalize_key(std::string_view s) {
    std::string collapsed;
    collapsed.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) {
            collapsed.push_back(' ');
            pending_space = false;
        }
        collapsed.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    std::size_t b = 0;
    std::size_t e = collapsed.size();
    while (b < e && (is_ascii_punct(collapsed[b]) || collapsed[b] == ' ')) ++b;
    while (e > b && (is_ascii_punct(collapsed[e - 1]) || collapsed[e - 1] == ' ')) --e;
    return collapsed.substr(b, e - b);
}

std::set<std::string> word_set(std::string_view s) {
    std::set<std::string> out;
    std::string current;
    for (char c : s) {
        if (is_word_byte(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            out.insert(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.insert(std::move(current));
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < s.size()) out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

bool contains_placeholder(std::string_view s) {
    static const std::regex placeholder(R"(\{[A-Za-z_][A-Za-z0-9_]*\})");
    return std::regex_search(s.begin(), s.end(), placeholder);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t seed_from_hex(std::string_view hex) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < hex.size() && i < 16; ++i) {
        const char c = hex[i];
        const int d = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : 0;
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    return v;
}

}  // namespace pforge::text
