#include "filterplus/http/headers.hpp"

#include <algorithm>
#include <array>

namespace filterplus::http {

namespace {

char lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

constexpr std::array<std::string_view, 9> kHopByHop = {
    "connection", "keep-alive", "proxy-connection", "proxy-authenticate",
    "proxy-authorization", "te", "trailer", "transfer-encoding", "upgrade",
};

}  // namespace

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (lower(a[i]) != lower(b[i])) {
            return false;
        }
    }
    return true;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = lower(c);
    }
    return out;
}

std::string_view trim(std::string_view s) {
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_ws(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_ws(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

bool has_header(const HeaderList& headers, std::string_view name) {
    return find_header(headers, name).has_value();
}

std::optional<std::string_view> find_header(const HeaderList& headers, std::string_view name) {
    for (const auto& h : headers) {
        if (iequals(h.name, name)) {
            return std::string_view(h.value);
        }
    }
    return std::nullopt;
}

std::size_t remove_header(HeaderList& headers, std::string_view name) {
    return std::erase_if(headers, [&](const Header& h) { return iequals(h.name, name); });
}

void set_header(HeaderList& headers, std::string_view name, std::string_view value) {
    remove_header(headers, name);
    headers.push_back({std::string(name), std::string(value)});
}

std::vector<std::string> header_tokens(const HeaderList& headers, std::string_view name) {
    std::vector<std::string> out;
    for (const auto& h : headers) {
        if (!iequals(h.name, name)) {
            continue;
        }
        std::string_view rest = h.value;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            auto tok = trim(rest.substr(0, comma));
            if (!tok.empty()) {
                out.push_back(to_lower(tok));
            }
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
    }
    return out;
}

std::string media_type(std::string_view content_type) {
    return to_lower(trim(content_type.substr(0, content_type.find(';'))));
}

void strip_hop_by_hop(HeaderList& headers) {
    auto nominated = header_tokens(headers, "connection");
    std::erase_if(headers, [&](const Header& h) {
        auto name = to_lower(h.name);
        return std::find(kHopByHop.begin(), kHopByHop.end(), name) != kHopByHop.end() ||
               std::find(nominated.begin(), nominated.end(), name) != nominated.end();
    });
}

}  // namespace filterplus::http
