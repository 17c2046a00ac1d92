#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace filterplus::policy {

using Timestamp = std::chrono::sys_seconds;

Timestamp now_seconds();

// "2026-10-14T05:13:00Z"
std::string format_rfc3339(Timestamp t);

// Accepts "Z" or a numeric offset, with optional fractional seconds
// (truncated). Returns nullopt on malformed input.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

}  // namespace filterplus::policy
