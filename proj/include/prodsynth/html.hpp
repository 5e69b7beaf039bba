#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace prodsynth::html {

// Element tree produced by a tolerant parser: unknown tags nest normally,
// void elements never take children, stray close tags are dropped, and
// td/th/tr auto-close their predecessors the way browsers do.
struct Node {
    bool is_text = false;
    std::string tag;   // lowercased; empty for text nodes
    std::string text;  // entity-decoded; empty for elements
    std::vector<Node> children;
};

// Never throws; any byte sequence yields a tree. Root carries tag "#document".
Node parse(std::string_view markup);

// Concatenated text of every descendant text node, in document order.
std::string text_content(const Node& node);

// Pre-order walk over elements (text nodes skipped).
void for_each_element(const Node& node, const std::function<void(const Node&)>& fn);

}  // namespace prodsynth::html
