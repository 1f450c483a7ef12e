// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pforge {

using TemplateVars = std::map<std::string, std::string, std::less<>>;

// Single-pass substitution of {name} placeholders. Substituted values are not
// rescanned. Throws Error(Template) for a placeholder without a value.
std::string render_template(std::string_view tmpl, const TemplateVars& vars);

// Placeholder names used in a template, in order of first appearance.
std::vector<std::string> template_placeholders(std::string_view tmpl);

// Named text assets (instruction templates, chat templates). Defaults are
// compiled in from assets/; a directory can override any of them by name.
class TemplateSet {
public:
    static TemplateSet defaults();
    // Files under dir whose relative path matches a default asset name replace it.
    static TemplateSet with_overrides(const std::filesystem::path& dir);

    const std::string& get(std::string_view name) const;
    bool contains(std::string_view name) const { return assets_.find(name) != assets_.end(); }
    std::string render(std::string_view name, const TemplateVars& vars) const;
    void set(std::string name, std::string body) { assets_[std::move(name)] = std::move(body); }
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::string, std::less<>> assets_;
};

// Generated at build time from assets/.
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_assets();

}  // namespace pforge
