// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "pforge/datagen.hpp"
#include "pforge/text.hpp"

namespace pforge {

namespace {

void require_no_placeholders(const std::string& field, const std::string& value) {
    const auto names = template_placeholders(value);
    if (!names.empty()) throw Error(ErrorCode::Template, "chat template " + field + ": unknown placeholder {" + names[0] + "}");
}

struct MessageShape {
    std::string prefix;  // before {role}
    std::string middle;  // between {role} and {content}
    std::string suffix;  // after {content}
};

MessageShape shape_of(const std::string& message) {
    const auto r = message.find("{role}");
    const auto c = message.find("{content}");
    return {message.substr(0, r), message.substr(r + 6, c - r - 6), message.substr(c + 9)};
}

const std::string& role_label(const ChatTemplate& t, Role role) {
    auto it = t.roles.find(to_string(role));
    if (it == t.roles.end()) throw Error(ErrorCode::Template, std::string("chat template has no label for role ") + to_string(role));
    return it->second;
}

}  // namespace

ChatTemplate ChatTemplate::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::Template, "chat template must be a JSON object");
    ChatTemplate t;
    auto str = [&](const char* key, bool required) {
        if (!j.contains(key)) {
            if (required) throw Error(ErrorCode::Template, std::string("chat template missing '") + key + "'");
            return std::string();
        }
        if (!j[key].is_string()) throw Error(ErrorCode::Template, std::string("chat template '") + key + "' must be a string");
        return j[key].get<std::string>();
    };
    t.name = str("name", false);
    t.begin = str("begin", false);
    t.message = str("message", true);
    t.separator = str("separator", false);
    t.end = str("end", false);
    require_no_placeholders("begin", t.begin);
    require_no_placeholders("separator", t.separator);
    require_no_placeholders("end", t.end);

    const auto names = template_placeholders(t.message);
    for (const auto& n : names) {
        if (n != "role" && n != "content") throw Error(ErrorCode::Template, "chat template message: unknown placeholder {" + n + "}");
    }
    const auto r = t.message.find("{role}");
    const auto c = t.message.find("{content}");
    if (r == std::string::npos || c == std::string::npos || c < r ||
        t.message.find("{role}", r + 1) != std::string::npos || t.message.find("{content}", c + 1) != std::string::npos) {
        throw Error(ErrorCode::Template, "chat template message needs one {role} followed by one {content}");
    }

    if (j.contains("roles")) {
        if (!j["roles"].is_object()) throw Error(ErrorCode::Template, "chat template 'roles' must be an object");
        for (auto it = j["roles"].begin(); it != j["roles"].end(); ++it) {
            if (!it.value().is_string()) throw Error(ErrorCode::Template, "chat template role '" + it.key() + "' must be a string");
            t.roles[it.key()] = it.value().get<std::string>();
        }
    }
    for (const char* role : {"system", "user", "assistant"}) {
        if (!t.roles.count(role)) t.roles[role] = role;
    }
    return t;
}

ChatTemplate ChatTemplate::load(const TemplateSet& templates, const std::string& name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(templates.get("chat/" + name + ".json"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Template, "chat template " + name + ": " + e.what());
    }
    auto t = from_json(j);
    if (t.name.empty()) t.name = name;
    return t;
}

std::string canonical_payload(const Json& j) { return j.dump(4); }

std::vector<ChatMessage> dialogue_messages(const Dialogue& d, const TemplateSet& templates) {
    return {
        {Role::User, d.turn1.render()},
        {Role::Assistant, canonical_payload(to_json(d.turn2))},
        {Role::User, text::trim(templates.get("templates/train_turn3_instruction.txt"))},
        {Role::Assistant, canonical_payload(to_json(d.turn3))},
        {Role::User, text::trim(templates.get("templates/train_turn4_instruction.txt"))},
        {Role::Assistant, canonical_payload(to_json(d.turn4))},
    };
}

std::string render_chat(const std::vector<ChatMessage>& messages, const ChatTemplate& tmpl) {
    std::string out = tmpl.begin;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (i) out += tmpl.separator;
        out += render_template(tmpl.message, {{"role", role_label(tmpl, messages[i].role)}, {"content", messages[i].content}});
    }
    return out + tmpl.end;
}

std::string export_chat_format(const Dialogue& d, const ChatTemplate& tmpl, const TemplateSet& templates) {
    return render_chat(dialogue_messages(d, templates), tmpl);
}

std::vector<ChatMessage> parse_chat_export(std::string_view text, const ChatTemplate& tmpl) {
    if (text.substr(0, tmpl.begin.size()) != tmpl.begin) throw Error(ErrorCode::Template, "export does not start with the template prefix");
    if (text.size() < tmpl.begin.size() + tmpl.end.size() || text.substr(text.size() - tmpl.end.size()) != tmpl.end) {
        throw Error(ErrorCode::Template, "export does not end with the template suffix");
    }
    const std::string_view body = text.substr(tmpl.begin.size(), text.size() - tmpl.begin.size() - tmpl.end.size());
    const auto shape = shape_of(tmpl.message);

    std::vector<ChatMessage> out;
    Role expected = Role::User;
    std::size_t pos = 0;
    while (pos < body.size() || out.empty()) {
        const std::string header = shape.prefix + role_label(tmpl, expected) + shape.middle;
        if (body.substr(pos, header.size()) != header) {
            throw Error(ErrorCode::Template, "expected " + std::string(to_string(expected)) + " header at offset " +
                                                 std::to_string(pos + tmpl.begin.size()));
        }
        pos += header.size();
        const Role next = expected == Role::User ? Role::Assistant : Role::User;
        const std::string boundary =
            shape.suffix + tmpl.separator + shape.prefix + role_label(tmpl, next) + shape.middle;
        const auto at = body.find(boundary, pos);
        if (at != std::string_view::npos) {
            out.push_back({expected, std::string(body.substr(pos, at - pos))});
            pos = at + shape.suffix.size() + tmpl.separator.size();
        } else {
            if (body.size() < pos + shape.suffix.size() || body.substr(body.size() - shape.suffix.size()) != shape.suffix) {
                throw Error(ErrorCode::Template, "final message is not terminated");
            }
            out.push_back({expected, std::string(body.substr(pos, body.size() - shape.suffix.size() - pos))});
            pos = body.size();
        }
        expected = next;
    }
    return out;
}

}  // namespace pforge
