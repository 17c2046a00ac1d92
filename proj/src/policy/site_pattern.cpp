#include "filterplus/policy/site_pattern.hpp"

#include <cstdio>

namespace filterplus::policy {

namespace {

std::string describe_char(char c, std::size_t offset) {
    char buf[64];
    auto uc = static_cast<unsigned char>(c);
    if (uc < 0x20 || uc >= 0x7f) {
        std::snprintf(buf, sizeof buf, "character 0x%02X at offset %zu", uc, offset);
    } else {
        std::snprintf(buf, sizeof buf, "character '%c' at offset %zu", c, offset);
    }
    return buf;
}

bool is_host_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
}

bool is_ipv6_char(char c) {
    return (c >= 'a' && c <= 'f') || (c >= '0' && c <= '9') || c == ':' || c == '.';
}

// `base` is the offset of `host` within the original pattern text.
void validate_host(std::string_view host, std::size_t base) {
    if (host.empty()) {
        throw PatternError("empty host", "offset " + std::to_string(base));
    }
    if (host.find(':') != std::string_view::npos) {
        for (std::size_t i = 0; i < host.size(); ++i) {
            if (!is_ipv6_char(host[i])) {
                throw PatternError("invalid IPv6 literal", describe_char(host[i], base + i));
            }
        }
        return;
    }
    if (host.size() > 253) {
        throw PatternError("host longer than 253 characters", "offset " + std::to_string(base));
    }
    std::size_t label_start = 0;
    for (std::size_t i = 0; i <= host.size(); ++i) {
        if (i == host.size() || host[i] == '.') {
            auto label = host.substr(label_start, i - label_start);
            auto where = "label '" + std::string(label) + "' at offset " + std::to_string(base + label_start);
            if (label.empty()) {
                throw PatternError("empty label", where);
            }
            if (label.size() > 63) {
                throw PatternError("label longer than 63 characters", where);
            }
            if (label.front() == '-' || label.back() == '-') {
                throw PatternError("label starts or ends with '-'", where);
            }
            label_start = i + 1;
            continue;
        }
        char c = host[i];
        if (c == '*') {
            throw PatternError("wildcard is only allowed as the entire leftmost label",
                               describe_char(c, base + i));
        }
        if (!is_host_char(c)) {
            auto uc = static_cast<unsigned char>(c);
            throw PatternError(uc >= 0x80 ? "non-ASCII character (use the punycode form)"
                                          : "invalid hostname character",
                               describe_char(c, base + i));
        }
    }
}

}  // namespace

SitePattern SitePattern::parse(std::string_view text) {
    std::string lowered(text);
    for (char& c : lowered) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    if (lowered == "*") {
        return global();
    }
    if (lowered.starts_with("*.")) {
        validate_host(std::string_view(lowered).substr(2), 2);
        return SitePattern(std::move(lowered), PatternKind::subdomain_wildcard);
    }
    std::string_view host = lowered;
    std::size_t base = 0;
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
        host = host.substr(1, host.size() - 2);
        base = 1;
        if (host.find(':') == std::string_view::npos) {
            throw PatternError("bracketed host is not an IPv6 literal", "offset 1");
        }
    }
    validate_host(host, base);
    return SitePattern(std::string(host), PatternKind::exact_host);
}

std::string_view SitePattern::suffix() const {
    std::string_view t = text_;
    return kind_ == PatternKind::subdomain_wildcard ? t.substr(2) : t;
}

bool SitePattern::matches(std::string_view host) const {
    switch (kind_) {
    case PatternKind::global_default:
        return true;
    case PatternKind::exact_host:
        return host == text_;
    case PatternKind::subdomain_wildcard: {
        auto s = suffix();
        return host.size() > s.size() + 1 && host.ends_with(s) && host[host.size() - s.size() - 1] == '.';
    }
    }
    return false;
}

std::string_view to_string(PatternKind kind) {
    switch (kind) {
    case PatternKind::exact_host: return "exact";
    case PatternKind::subdomain_wildcard: return "wildcard";
    case PatternKind::global_default: return "default";
    }
    return {};
}

}  // namespace filterplus::policy
