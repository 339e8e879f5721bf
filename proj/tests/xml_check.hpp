#pragma once

// Minimal strict XML well-formedness checker for the SVG golden tests.
// Verifies: one root element, balanced and properly nested tags, quoted
// attribute values, no stray '<' or '&' in character data (only the
// predefined entities are accepted).

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace testsupport {

struct XmlCheck {
    bool ok = true;
    std::string error;
};

inline XmlCheck check_xml(std::string_view text) {
    auto fail = [](std::string msg) { return XmlCheck{false, std::move(msg)}; };

    std::vector<std::string> stack;
    bool seen_root = false;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto is_name_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' ||
               c == '.';
    };

    while (i < n) {
        const char c = text[i];
        if (c == '<') {
            if (i + 1 >= n) return fail("dangling '<' at end of input");
            if (text[i + 1] == '!') {  // comments only; no doctype in our output
                const auto end = text.find("-->", i);
                if (text.substr(i, 4) != "<!--" || end == std::string_view::npos)
                    return fail("malformed comment");
                i = end + 3;
                continue;
            }
            if (text[i + 1] == '?') {
                const auto end = text.find("?>", i);
                if (end == std::string_view::npos) return fail("unterminated processing instruction");
                i = end + 2;
                continue;
            }
            const bool closing = text[i + 1] == '/';
            std::size_t j = i + (closing ? 2 : 1);
            std::size_t name_start = j;
            while (j < n && is_name_char(text[j])) ++j;
            if (j == name_start) return fail("missing element name near offset " + std::to_string(i));
            const std::string name(text.substr(name_start, j - name_start));

            if (closing) {
                while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
                if (j >= n || text[j] != '>') return fail("malformed closing tag </" + name);
                if (stack.empty() || stack.back() != name)
                    return fail("mismatched closing tag </" + name + ">");
                stack.pop_back();
                i = j + 1;
                continue;
            }

            // attributes
            bool self_closed = false;
            while (j < n) {
                while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
                if (j >= n) return fail("unterminated tag <" + name);
                if (text[j] == '>') {
                    ++j;
                    break;
                }
                if (text[j] == '/') {
                    if (j + 1 >= n || text[j + 1] != '>') return fail("malformed self-closing tag");
                    self_closed = true;
                    j += 2;
                    break;
                }
                std::size_t attr_start = j;
                while (j < n && is_name_char(text[j])) ++j;
                if (j == attr_start) return fail("malformed attribute in <" + name + ">");
                if (j >= n || text[j] != '=') return fail("attribute without value in <" + name + ">");
                ++j;
                if (j >= n || (text[j] != '"' && text[j] != '\''))
                    return fail("unquoted attribute value in <" + name + ">");
                const char quote = text[j];
                ++j;
                while (j < n && text[j] != quote) {
                    if (text[j] == '<') return fail("'<' inside attribute value");
                    ++j;
                }
                if (j >= n) return fail("unterminated attribute value in <" + name + ">");
                ++j;
            }

            if (stack.empty()) {
                if (seen_root) return fail("multiple root elements");
                seen_root = true;
            }
            if (!self_closed) stack.push_back(name);
            i = j;
            continue;
        }
        if (c == '>') return fail("stray '>' at offset " + std::to_string(i));
        if (c == '&') {
            static const char* entities[] = {"&amp;", "&lt;", "&gt;", "&quot;", "&apos;"};
            bool matched = false;
            for (const char* e : entities)
                if (text.substr(i, std::string_view(e).size()) == e) {
                    i += std::string_view(e).size();
                    matched = true;
                    break;
                }
            if (!matched) return fail("bare '&' at offset " + std::to_string(i));
            continue;
        }
        if (stack.empty() && !std::isspace(static_cast<unsigned char>(c)) && seen_root)
            return fail("character data after root element");
        if (stack.empty() && !std::isspace(static_cast<unsigned char>(c)) && !seen_root)
            return fail("character data before root element");
        ++i;
    }
    if (!stack.empty()) return fail("unclosed element <" + stack.back() + ">");
    if (!seen_root) return fail("no root element");
    return {};
}

}  // namespace testsupport
