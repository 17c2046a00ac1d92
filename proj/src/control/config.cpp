#include "filterplus/control/config.hpp"

#include <charconv>

namespace filterplus::control {

std::string ListenAddress::to_string() const {
    auto h = host.find(':') != std::string::npos ? "[" + host + "]" : host;
    return h + ":" + std::to_string(port);
}

ListenAddress parse_listen_address(std::string_view text) {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("listen address '" + std::string(text) + "' must be host:port");
    }
    auto host = text.substr(0, colon);
    auto port_text = text.substr(colon + 1);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
        host = host.substr(1, host.size() - 2);
    } else if (host.find(':') != std::string_view::npos) {
        throw ConfigError("IPv6 listen address '" + std::string(text) + "' must be bracketed");
    }
    unsigned value = 0;
    auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (port_text.empty() || ec != std::errc() || end != port_text.data() + port_text.size() || value > 65535) {
        throw ConfigError("invalid port in listen address '" + std::string(text) + "'");
    }
    ListenAddress out;
    out.host = host.empty() ? "127.0.0.1" : std::string(host);
    out.port = static_cast<std::uint16_t>(value);
    return out;
}

bool conflicts(const ListenAddress& a, const ListenAddress& b) {
    if (a.port == 0 || b.port == 0 || a.port != b.port) {
        return false;
    }
    auto wildcard = [](const std::string& h) { return h == "0.0.0.0" || h == "::" || h == "*"; };
    return a.host == b.host || wildcard(a.host) || wildcard(b.host);
}

void ServerConfig::validate() const {
    if (conflicts(proxy_listen, control_listen)) {
        throw ConfigError("proxy and control listeners must differ (both " + proxy_listen.to_string() + ")");
    }
    if (log_capacity < 1) {
        throw ConfigError("log capacity must be at least 1");
    }
    if (rules_path.empty()) {
        throw ConfigError("rules file path is empty");
    }
}

}  // namespace filterplus::control
