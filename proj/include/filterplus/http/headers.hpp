#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filterplus::http {

struct Header {
    std::string name;
    std::string value;

    bool operator==(const Header&) const = default;
};

// Ordered, duplicate-preserving header list of one message.
using HeaderList = std::vector<Header>;

bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

bool has_header(const HeaderList& headers, std::string_view name);
// First value for a name (case-insensitive), if any.
std::optional<std::string_view> find_header(const HeaderList& headers, std::string_view name);
// Removes every header with this name; returns how many were removed.
std::size_t remove_header(HeaderList& headers, std::string_view name);
// Replaces all headers of this name with a single one appended at the end.
void set_header(HeaderList& headers, std::string_view name, std::string_view value);

// Comma-separated tokens of a header, lowercased and trimmed (e.g. Connection).
std::vector<std::string> header_tokens(const HeaderList& headers, std::string_view name);

// Media type without parameters, lowercased: "Text/HTML; charset=x" -> "text/html".
std::string media_type(std::string_view content_type);

// Connection, Keep-Alive, Proxy-*, TE, Trailer, Transfer-Encoding, Upgrade and
// anything nominated by the Connection header.
void strip_hop_by_hop(HeaderList& headers);

}  // namespace filterplus::http
