#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace filterplus::policy {

// Raised for a malformed pattern. `locus` names the offending character or
// label, e.g. "character ' ' at offset 3".
class PatternError : public std::invalid_argument {
public:
    PatternError(const std::string& message, std::string locus)
        : std::invalid_argument(message), locus_(std::move(locus)) {}
    const std::string& locus() const { return locus_; }

private:
    std::string locus_;
};

enum class PatternKind { exact_host, subdomain_wildcard, global_default };

// Host-matching key of a rule: "example.com", "*.example.com" or "*".
class SitePattern {
public:
    // ASCII-lowercases then validates; throws PatternError. IDNs must be
    // given in punycode form.
    static SitePattern parse(std::string_view text);
    static SitePattern global() { return SitePattern("*", PatternKind::global_default); }

    const std::string& text() const { return text_; }
    PatternKind kind() const { return kind_; }

    // For wildcards, the host after "*."; otherwise the whole text.
    std::string_view suffix() const;

    // `host` must already be normalized (lowercase, no trailing dot).
    // "*.example.com" matches proper subdomains at any depth, not the apex.
    bool matches(std::string_view host) const;

    bool operator==(const SitePattern&) const = default;
    auto operator<=>(const SitePattern& other) const { return text_ <=> other.text_; }

private:
    SitePattern(std::string text, PatternKind kind) : text_(std::move(text)), kind_(kind) {}

    std::string text_;
    PatternKind kind_;
};

std::string_view to_string(PatternKind kind);

}  // namespace filterplus::policy
