#pragma once

// Small UTF-8 and whitespace helpers shared by the chunker, the trigger
// injector and the refusal matcher.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace obbr::text {

inline bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

/// Byte offsets at which each code point starts, plus a final entry equal to
/// `s.size()`. Malformed continuation bytes are treated as single code points.
inline std::vector<std::size_t> code_point_offsets(std::string_view s) {
    std::vector<std::size_t> offs;
    offs.reserve(s.size() + 1);
    std::size_t i = 0;
    while (i < s.size()) {
        offs.push_back(i);
        auto lead = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if (lead >= 0xF0) len = 4;
        else if (lead >= 0xE0) len = 3;
        else if (lead >= 0xC0) len = 2;
        std::size_t j = 1;
        while (j < len && i + j < s.size() &&
               (static_cast<unsigned char>(s[i + j]) & 0xC0) == 0x80)
            ++j;
        i += j;
    }
    offs.push_back(s.size());
    return offs;
}

inline std::size_t code_point_count(std::string_view s) {
    return code_point_offsets(s).size() - 1;
}

/// First `n` code points of `s`.
inline std::string_view prefix_code_points(std::string_view s, std::size_t n) {
    auto offs = code_point_offsets(s);
    if (n + 1 >= offs.size()) return s;
    return s.substr(0, offs[n]);
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

/// Byte ranges [begin, end) of maximal non-whitespace runs.
inline std::vector<std::pair<std::size_t, std::size_t>> words(std::string_view s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        if (i == s.size()) break;
        std::size_t b = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        out.emplace_back(b, i);
    }
    return out;
}

/// Non-overlapping occurrences of `needle` in `hay`, scanned left to right.
inline std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
    if (needle.empty()) return 0;
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string_view::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    if (from.empty()) return s;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

inline std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace obbr::text
