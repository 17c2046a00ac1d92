#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filterplus/http/headers.hpp"
#include "filterplus/policy/policy.hpp"

namespace filterplus::cookie {

struct CookieAttribute {
    std::string name;  // case preserved
    std::optional<std::string> value;

    bool operator==(const CookieAttribute&) const = default;
};

struct SetCookieRecord {
    std::string name;
    std::string value;
    std::vector<CookieAttribute> attributes;  // input order

    bool operator==(const SetCookieRecord&) const = default;
};

// Splits on the first "=" and then on ";", trimming whitespace and dropping
// empty segments. Returns nullopt when the cookie name is empty or contains
// whitespace or control characters, or when there is no "=".
std::optional<SetCookieRecord> parse_set_cookie(std::string_view header_value);

std::string serialize_set_cookie(const SetCookieRecord& record);

// Case-insensitive; true when Expires or Max-Age was present.
bool strip_persistence(SetCookieRecord& record);

enum class Direction { request, response };

enum class EditKind { removed, modified, unparseable };

struct CookieEdit {
    EditKind kind;
    std::string header;       // "Cookie" or "Set-Cookie" as received
    std::string cookie_name;  // empty when unparseable
};

struct CookieResult {
    http::HeaderList headers;
    std::vector<CookieEdit> edits;  // one per removed or modified header
};

// Allow leaves headers untouched. Block removes Cookie (request) or
// Set-Cookie (response) headers. SessionOnly strips Expires/Max-Age from
// each Set-Cookie. Malformed Set-Cookie headers are dropped unless Allow.
CookieResult apply_cookie_policy(Direction direction, const http::HeaderList& headers,
                                 policy::CookiePolicy policy);

}  // namespace filterplus::cookie
