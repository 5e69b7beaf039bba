#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace prodsynth::text {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// ASCII lowercase; bytes outside [A-Z] pass through untouched.
inline std::string casefold(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

// Collapse internal whitespace runs to single spaces and trim the ends.
std::string collapse_ws(std::string_view s);

// Split on whitespace runs. Empty input yields an empty list.
std::vector<std::string> split_ws(std::string_view s);

// Canonical form used for attribute-name comparisons: trim, then casefold.
inline std::string normalized_name(std::string_view s) { return casefold(trim(s)); }

inline bool same_name(std::string_view a, std::string_view b) {
    return normalized_name(a) == normalized_name(b);
}

// Cluster-key normalization: casefold and drop every non-alphanumeric byte.
std::string normalize_key(std::string_view s);

}  // namespace prodsynth::text
