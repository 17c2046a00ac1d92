#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "filterplus/policy/policy.hpp"

namespace filterplus::control {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ListenAddress {
    std::string host;
    std::uint16_t port = 0;

    std::string to_string() const;
    bool operator==(const ListenAddress&) const = default;
};

// "host:port", "[v6]:port" or ":port" (loopback). Port 0 means ephemeral.
ListenAddress parse_listen_address(std::string_view text);

// True when both addresses would claim the same socket. Two ephemeral
// requests never do.
bool conflicts(const ListenAddress& a, const ListenAddress& b);

struct ServerConfig {
    ListenAddress proxy_listen{"127.0.0.1", 8888};
    ListenAddress control_listen{"127.0.0.1", 8899};
    std::filesystem::path rules_path = "filterplus-rules.json";
    std::size_t log_capacity = 1024;
    // Command-line overrides laid over the rule file's "default".
    policy::PolicySet baseline_overrides;
    std::optional<std::filesystem::path> console_dir;
    // Origin allowed by CORS; empty means same-origin only.
    std::string console_origin;

    // Throws ConfigError.
    void validate() const;
};

}  // namespace filterplus::control
