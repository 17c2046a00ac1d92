#include "precedence_oracle.hpp"

#include <cctype>

namespace oracle {

std::string host_of(std::string_view url) {
    auto scheme_end = url.find("://");
    auto rest = scheme_end == std::string_view::npos ? url : url.substr(scheme_end + 3);
    auto stop = rest.find_first_of("/?#");
    auto authority = rest.substr(0, stop == std::string_view::npos ? rest.size() : stop);
    auto at = authority.rfind('@');
    if (at != std::string_view::npos) {
        authority = authority.substr(at + 1);
    }
    std::string host;
    if (!authority.empty() && authority.front() == '[') {
        host = std::string(authority.substr(1, authority.find(']') - 1));
    } else {
        host = std::string(authority.substr(0, authority.find(':')));
    }
    for (char& c : host) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (!host.empty() && host.back() == '.') {
        host.pop_back();
    }
    return host;
}

namespace {

// Higher is better; 0 means the rule does not apply.
long score(const std::string& pattern, const std::string& host) {
    if (pattern == "*") {
        return 1;
    }
    if (pattern.size() > 2 && pattern[0] == '*' && pattern[1] == '.') {
        std::string suffix = pattern.substr(1);
        if (host.size() > suffix.size() && host.compare(host.size() - suffix.size(), suffix.size(), suffix) == 0) {
            return 2 * 100000 + static_cast<long>(suffix.size());
        }
        return 0;
    }
    return pattern == host ? 3 * 100000 : 0;
}

}  // namespace

std::array<FieldAnswer, 5> resolve(const std::vector<PlainRule>& rules, std::string_view url,
                                   const std::array<std::string, 5>& baseline) {
    auto host = host_of(url);
    std::array<FieldAnswer, 5> out;
    for (std::size_t f = 0; f < kFieldNames.size(); ++f) {
        long best = 0;
        out[f] = {baseline[f], "baseline"};
        for (const auto& rule : rules) {
            auto it = rule.fields.find(std::string(kFieldNames[f]));
            if (it == rule.fields.end()) {
                continue;
            }
            auto s = score(rule.pattern, host);
            if (s > best) {
                best = s;
                out[f] = {it->second, rule.pattern};
            }
        }
    }
    return out;
}

}  // namespace oracle
