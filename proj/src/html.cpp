#include "prodsynth/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "prodsynth/text.hpp"

namespace prodsynth::html {

namespace {

bool is_void_element(const std::string& tag) {
    static const char* kVoid[] = {"area", "base", "br",    "col",  "embed", "hr",    "img",
                                  "input", "link", "meta", "param", "source", "track", "wbr"};
    return std::find(std::begin(kVoid), std::end(kVoid), tag) != std::end(kVoid);
}

bool is_raw_text_element(const std::string& tag) { return tag == "script" || tag == "style"; }

void append_codepoint(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decode &amp;-style references; unknown names pass through verbatim.
std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") {
            out.push_back('&');
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (name == "nbsp") {
            out.push_back(' ');
        } else if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            bool ok = false;
            if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                for (std::size_t k = 2; k < name.size(); ++k) {
                    char c = name[k];
                    if (!std::isxdigit(static_cast<unsigned char>(c))) {
                        ok = false;
                        break;
                    }
                    cp = cp * 16 + static_cast<unsigned long>(
                                       std::isdigit(static_cast<unsigned char>(c))
                                           ? c - '0'
                                           : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
                    ok = true;
                }
            } else {
                for (std::size_t k = 1; k < name.size(); ++k) {
                    if (!std::isdigit(static_cast<unsigned char>(name[k]))) {
                        ok = false;
                        break;
                    }
                    cp = cp * 10 + static_cast<unsigned long>(name[k] - '0');
                    ok = true;
                }
            }
            if (ok && cp > 0 && cp < 0x110000) {
                append_codepoint(out, cp);
            } else {
                out.append(s.substr(i, semi - i + 1));
            }
        } else {
            out.append(s.substr(i, semi - i + 1));
        }
        i = semi + 1;
    }
    return out;
}

struct Builder {
    Node root;
    std::vector<Node*> stack;

    Builder() {
        root.tag = "#document";
        stack.push_back(&root);
    }

    Node* top() { return stack.back(); }

    bool stack_has(std::string_view tag) const {
        for (auto it = stack.rbegin(); it != stack.rend(); ++it)
            if ((*it)->tag == tag) return true;
        return false;
    }

    void close_one() {
        if (stack.size() > 1) stack.pop_back();
    }

    // Implicit end tags: a new cell ends the previous cell, a new row ends any
    // open cell and the previous row, as browsers repair bare table markup.
    void auto_close_for(const std::string& tag) {
        auto close_while = [&](auto pred) {
            while (stack.size() > 1 && pred(top()->tag)) close_one();
        };
        if (tag == "td" || tag == "th") {
            close_while([](const std::string& t) { return t == "td" || t == "th"; });
        } else if (tag == "tr") {
            close_while([](const std::string& t) { return t == "td" || t == "th" || t == "tr"; });
        } else if (tag == "li") {
            close_while([](const std::string& t) { return t == "li"; });
        } else if (tag == "p") {
            close_while([](const std::string& t) { return t == "p"; });
        } else if (tag == "dt" || tag == "dd") {
            close_while([](const std::string& t) { return t == "dt" || t == "dd"; });
        } else if (tag == "option") {
            close_while([](const std::string& t) { return t == "option"; });
        }
    }

    void open(const std::string& tag, bool self_closing) {
        auto_close_for(tag);
        top()->children.push_back(Node{false, tag, "", {}});
        if (!self_closing && !is_void_element(tag)) stack.push_back(&top()->children.back());
    }

    void close(const std::string& tag) {
        if (!stack_has(tag)) return;  // stray close tag: ignore
        while (stack.size() > 1) {
            bool match = top()->tag == tag;
            close_one();
            if (match) break;
        }
    }

    void add_text(std::string_view raw) {
        std::string decoded = decode_entities(raw);
        if (decoded.empty()) return;
        top()->children.push_back(Node{true, "", std::move(decoded), {}});
    }
};

bool is_tag_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':';
}

}  // namespace

Node parse(std::string_view markup) {
    Builder builder;
    std::size_t i = 0;
    const std::size_t n = markup.size();

    while (i < n) {
        if (markup[i] != '<') {
            std::size_t lt = markup.find('<', i);
            if (lt == std::string_view::npos) lt = n;
            builder.add_text(markup.substr(i, lt - i));
            i = lt;
            continue;
        }
        if (markup.compare(i, 4, "<!--") == 0) {
            std::size_t end = markup.find("-->", i + 4);
            i = end == std::string_view::npos ? n : end + 3;
            continue;
        }
        if (i + 1 < n && (markup[i + 1] == '!' || markup[i + 1] == '?')) {
            std::size_t end = markup.find('>', i + 1);
            i = end == std::string_view::npos ? n : end + 1;
            continue;
        }
        bool closing = i + 1 < n && markup[i + 1] == '/';
        std::size_t name_start = i + (closing ? 2 : 1);
        if (name_start >= n || !std::isalpha(static_cast<unsigned char>(markup[name_start]))) {
            // A lone '<' that opens no tag is literal text.
            builder.add_text(markup.substr(i, 1));
            ++i;
            continue;
        }
        std::size_t name_end = name_start;
        while (name_end < n && is_tag_name_char(markup[name_end])) ++name_end;
        std::string tag = text::casefold(markup.substr(name_start, name_end - name_start));

        // Scan to the closing '>' while honoring quoted attribute values.
        std::size_t j = name_end;
        char quote = 0;
        while (j < n) {
            char c = markup[j];
            if (quote) {
                if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                break;
            }
            ++j;
        }
        bool self_closing = false;
        if (j < n && j > name_end) {
            std::size_t k = j;
            while (k > name_end && text::is_space(markup[k - 1])) --k;
            self_closing = k > name_end && markup[k - 1] == '/';
        }
        i = j == n ? n : j + 1;

        if (closing) {
            builder.close(tag);
            continue;
        }
        builder.open(tag, self_closing);
        if (!self_closing && is_raw_text_element(tag)) {
            // Swallow everything until the matching close tag, verbatim.
            std::string needle = "</" + tag;
            std::size_t end = i;
            while (end < n) {
                std::size_t cand = markup.find('<', end);
                if (cand == std::string_view::npos || cand + needle.size() > n) {
                    end = n;
                    break;
                }
                std::string head = text::casefold(markup.substr(cand, needle.size()));
                if (head == needle) {
                    end = cand;
                    break;
                }
                end = cand + 1;
            }
            if (end > i) builder.top()->children.push_back(Node{true, "", std::string(markup.substr(i, end - i)), {}});
            if (end < n) {
                std::size_t gt = markup.find('>', end);
                i = gt == std::string_view::npos ? n : gt + 1;
            } else {
                i = n;
            }
            builder.close(tag);
        }
    }
    return builder.root;
}

namespace {

void collect_text(const Node& node, std::string& out) {
    if (node.is_text) {
        out += node.text;
        return;
    }
    for (const auto& child : node.children) collect_text(child, out);
}

}  // namespace

std::string text_content(const Node& node) {
    std::string out;
    collect_text(node, out);
    return out;
}

void for_each_element(const Node& node, const std::function<void(const Node&)>& fn) {
    if (!node.is_text && node.tag != "#document") fn(node);
    for (const auto& child : node.children) for_each_element(child, fn);
}

}  // namespace prodsynth::html
