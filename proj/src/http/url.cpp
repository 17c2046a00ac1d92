#include "filterplus/http/url.hpp"

#include <charconv>

#include "filterplus/http/headers.hpp"

namespace filterplus::http {

namespace {

std::uint16_t parse_port(std::string_view text) {
    if (text.empty() || text.size() > 5) {
        throw UrlError("invalid port '" + std::string(text) + "'");
    }
    unsigned value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || value == 0 || value > 65535) {
        throw UrlError("invalid port '" + std::string(text) + "'");
    }
    return static_cast<std::uint16_t>(value);
}

std::uint16_t default_port(std::string_view scheme) {
    if (scheme == "https" || scheme == "wss") {
        return 443;
    }
    if (scheme == "ftp") {
        return 21;
    }
    return 80;
}

// Splits "host[:port]" / "[v6][:port]"; port_text is empty when absent.
void split_host_port(std::string_view authority, std::string_view& host, std::string_view& port_text) {
    port_text = {};
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string_view::npos) {
            throw UrlError("unterminated IPv6 literal");
        }
        host = authority.substr(1, close - 1);
        auto rest = authority.substr(close + 1);
        if (!rest.empty()) {
            if (rest.front() != ':') {
                throw UrlError("garbage after IPv6 literal");
            }
            port_text = rest.substr(1);
            if (port_text.empty()) {
                throw UrlError("empty port");
            }
        }
        return;
    }
    auto colon = authority.rfind(':');
    if (colon == std::string_view::npos) {
        host = authority;
        return;
    }
    host = authority.substr(0, colon);
    port_text = authority.substr(colon + 1);
    if (port_text.empty()) {
        throw UrlError("empty port");
    }
}

std::string normalize_host(std::string_view host) {
    std::string out = to_lower(host);
    if (!out.empty() && out.back() == '.') {
        out.pop_back();
    }
    return out;
}

}  // namespace

std::string Url::authority() const {
    std::string out = host.find(':') != std::string::npos ? "[" + host + "]" : host;
    if (port != default_port(scheme)) {
        out += ":" + std::to_string(port);
    }
    return out;
}

std::string_view Url::path_only() const {
    std::string_view p = path;
    return p.substr(0, p.find('?'));
}

Url parse_absolute_url(std::string_view text) {
    auto sep = text.find("://");
    if (sep == std::string_view::npos || sep == 0) {
        throw UrlError("not an absolute URL: '" + std::string(text) + "'");
    }
    Url url;
    url.scheme = to_lower(text.substr(0, sep));
    for (char c : url.scheme) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.')) {
            throw UrlError("invalid scheme '" + url.scheme + "'");
        }
    }
    auto rest = text.substr(sep + 3);
    auto auth_end = rest.find_first_of("/?#");
    auto authority = rest.substr(0, auth_end);
    if (auto at = authority.rfind('@'); at != std::string_view::npos) {
        authority.remove_prefix(at + 1);
    }
    std::string_view host;
    std::string_view port_text;
    split_host_port(authority, host, port_text);
    url.host = normalize_host(host);
    if (url.host.empty()) {
        throw UrlError("URL has no host: '" + std::string(text) + "'");
    }
    url.port = port_text.empty() ? default_port(url.scheme) : parse_port(port_text);
    if (auth_end == std::string_view::npos) {
        url.path = "/";
    } else {
        auto path = rest.substr(auth_end);
        path = path.substr(0, path.find('#'));
        url.path = (path.empty() || path.front() != '/') ? "/" + std::string(path) : std::string(path);
    }
    return url;
}

HostPort parse_authority(std::string_view text) {
    std::string_view host;
    std::string_view port_text;
    split_host_port(text, host, port_text);
    if (port_text.empty()) {
        throw UrlError("CONNECT target needs host:port");
    }
    HostPort out{normalize_host(host), parse_port(port_text)};
    if (out.host.empty()) {
        throw UrlError("CONNECT target has no host");
    }
    return out;
}

std::string path_extension(std::string_view path) {
    path = path.substr(0, path.find_first_of("?#"));
    auto slash = path.rfind('/');
    auto segment = slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto dot = segment.rfind('.');
    if (dot == std::string_view::npos || dot + 1 == segment.size()) {
        return {};
    }
    return to_lower(segment.substr(dot + 1));
}

std::string percent_decode(std::string_view text) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '%' && i + 2 < text.size()) {
            int hi = hex(text[i + 1]);
            int lo = hex(text[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(text[i]);
    }
    return out;
}

}  // namespace filterplus::http
