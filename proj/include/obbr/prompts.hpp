#pragma once

// Rewriter system prompts. The texts are shipped under resources/prompts/
// and embedded byte-for-byte at build time.

#include <optional>
#include <string_view>

#include <obbr/resources.hpp>

namespace obbr {

enum class RewriteMode { OBBR, CBBR, DPR, Paraphrase };

inline std::string_view to_string(RewriteMode m) noexcept {
    switch (m) {
    case RewriteMode::OBBR: return "OBBR";
    case RewriteMode::CBBR: return "CBBR";
    case RewriteMode::DPR: return "DPR";
    case RewriteMode::Paraphrase: return "Paraphrase";
    }
    return "?";
}

inline std::optional<RewriteMode> parse_rewrite_mode(std::string_view s) noexcept {
    for (auto m : {RewriteMode::OBBR, RewriteMode::CBBR, RewriteMode::DPR, RewriteMode::Paraphrase})
        if (to_string(m) == s) return m;
    if (s == "obbr") return RewriteMode::OBBR;
    if (s == "cbbr") return RewriteMode::CBBR;
    if (s == "dpr") return RewriteMode::DPR;
    if (s == "paraphrase") return RewriteMode::Paraphrase;
    return std::nullopt;
}

namespace prompts {

inline constexpr std::string_view version = "v1";

/// Slot in the open-book template that receives the exemplar lines.
inline constexpr std::string_view examples_slot = "{examples}";

/// The open-book block that the closed-book prompt omits.
inline constexpr std::string_view examples_header = "WRITING EXAMPLES:\n";

inline std::string_view template_for(RewriteMode m) noexcept {
    switch (m) {
    case RewriteMode::OBBR: return resources::prompt_obbr_v1;
    case RewriteMode::CBBR: return resources::prompt_cbbr_v1;
    case RewriteMode::DPR: return resources::prompt_dpr_v1;
    case RewriteMode::Paraphrase: return resources::prompt_paraphrase_v1;
    }
    return {};
}

inline bool is_open_book(RewriteMode m) noexcept { return m == RewriteMode::OBBR; }

} // namespace prompts
} // namespace obbr
