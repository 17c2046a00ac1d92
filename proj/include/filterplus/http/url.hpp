#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace filterplus::http {

class UrlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Url {
    std::string scheme;  // lowercased
    std::string host;    // lowercased, no brackets for IPv6, no trailing dot
    std::uint16_t port = 0;
    std::string path;    // path + query, always starts with '/'

    // Host as written in a Host header or request line (IPv6 re-bracketed,
    // port omitted when it is the scheme default).
    std::string authority() const;
    // Path without the query string.
    std::string_view path_only() const;
};

// Absolute URL: scheme "://" [userinfo "@"] host [":" port] [path]. Throws
// UrlError when there is no host or the port is out of range.
Url parse_absolute_url(std::string_view text);

struct HostPort {
    std::string host;
    std::uint16_t port = 0;
};

// CONNECT authority-form "host:port"; the port is mandatory and 1..65535.
HostPort parse_authority(std::string_view text);

// Lowercased extension of the last path segment ("" when absent).
std::string path_extension(std::string_view path);

std::string percent_decode(std::string_view text);

}  // namespace filterplus::http
