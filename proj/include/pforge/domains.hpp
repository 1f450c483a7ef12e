// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pforge {

struct Domain {
    std::string id;  // kebab-case slug of the name
    std::string name;
    std::string theme_description;
};

// The fixed list of 41 everyday domains used for intent simulation.
class DomainRegistry {
public:
    static const DomainRegistry& builtin();

    const std::vector<Domain>& domains() const { return domains_; }
    std::size_t size() const { return domains_.size(); }
    bool contains(std::string_view id) const { return find(id) != nullptr; }
    const Domain* find(std::string_view id) const;
    const Domain& at(std::string_view id) const;

private:
    DomainRegistry();
    std::vector<Domain> domains_;
};

inline constexpr std::size_t kDomainCount = 41;

}  // namespace pforge
