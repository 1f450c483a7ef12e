// SPDX-License-Identifier: Apache-2.0
#include "pforge/templates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "pforge/errors.hpp"

namespace pforge {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of a {name} placeholder starting at pos, or 0.
std::size_t placeholder_at(std::string_view s, std::size_t pos) {
    if (s[pos] != '{' || pos + 2 >= s.size() || !ident_start(s[pos + 1])) return 0;
    std::size_t i = pos + 2;
    while (i < s.size() && ident_char(s[i])) ++i;
    return (i < s.size() && s[i] == '}') ? i - pos + 1 : 0;
}

}  // namespace

std::string render_template(std::string_view tmpl, const TemplateVars& vars) {
    std::string out;
    out.reserve(tmpl.size());
    for (std::size_t i = 0; i < tmpl.size();) {
        if (const auto len = placeholder_at(tmpl, i)) {
            const auto name = tmpl.substr(i + 1, len - 2);
            auto it = vars.find(name);
            if (it == vars.end()) throw Error(ErrorCode::Template, "unknown placeholder {" + std::string(name) + "}");
            out += it->second;
            i += len;
        } else {
            out.push_back(tmpl[i++]);
        }
    }
    return out;
}

std::vector<std::string> template_placeholders(std::string_view tmpl) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (const auto len = placeholder_at(tmpl, i)) {
            std::string name(tmpl.substr(i + 1, len - 2));
            if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
            i += len - 1;
        }
    }
    return names;
}

TemplateSet TemplateSet::defaults() {
    TemplateSet set;
    for (const auto& [name, body] : embedded_assets()) set.assets_.emplace(std::string(name), std::string(body));
    return set;
}

TemplateSet TemplateSet::with_overrides(const std::filesystem::path& dir) {
    TemplateSet set = defaults();
    if (dir.empty()) return set;
    if (!std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::Io, "template directory " + dir.string() + " does not exist");
    }
    for (auto& [name, body] : set.assets_) {
        const auto candidate = dir / name;
        if (!std::filesystem::is_regular_file(candidate)) continue;
        std::ifstream in(candidate, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    return set;
}

const std::string& TemplateSet::get(std::string_view name) const {
    auto it = assets_.find(name);
    if (it == assets_.end()) throw Error(ErrorCode::Template, "no asset named '" + std::string(name) + "'");
    return it->second;
}

std::string TemplateSet::render(std::string_view name, const TemplateVars& vars) const {
    try {
        return render_template(get(name), vars);
    } catch (const Error& e) {
        throw Error(ErrorCode::Template, std::string(name) + ": " + e.what());
    }
}

std::vector<std::string> TemplateSet::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : assets_) out.push_back(name);
    return out;
}

}  // namespace pforge
