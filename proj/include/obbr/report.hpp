#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#ifndef OBBR_BUILD_ID
#define OBBR_BUILD_ID "unknown"
#endif

namespace obbr {

inline constexpr int report_schema_version = 1;

inline constexpr std::string_view build_id() noexcept { return OBBR_BUILD_ID; }

/// Common header stamped on every JSON report.
inline nlohmann::ordered_json report_envelope(std::string_view kind) {
    nlohmann::ordered_json j;
    j["report"] = kind;
    j["schema_version"] = report_schema_version;
    j["build_id"] = build_id();
    return j;
}

} // namespace obbr
