#include "filterplus/cookie/cookie.hpp"

namespace filterplus::cookie {

namespace {

std::string_view trim_ws(std::string_view s) {
    auto is_ws = [](char c) { return c == ' ' || c == '\t'; };
    while (!s.empty() && is_ws(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_ws(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

bool valid_name(std::string_view name) {
    if (name.empty()) {
        return false;
    }
    for (char c : name) {
        auto uc = static_cast<unsigned char>(c);
        if (uc < 0x20 || uc == 0x7f || c == ' ' || c == '=' || c == ';') {
            return false;
        }
    }
    return true;
}

}  // namespace

std::optional<SetCookieRecord> parse_set_cookie(std::string_view header_value) {
    auto semi = header_value.find(';');
    auto pair = header_value.substr(0, semi);
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) {
        return std::nullopt;
    }
    SetCookieRecord rec;
    auto name = trim_ws(pair.substr(0, eq));
    if (!valid_name(name)) {
        return std::nullopt;
    }
    rec.name = std::string(name);
    rec.value = std::string(trim_ws(pair.substr(eq + 1)));

    auto rest = semi == std::string_view::npos ? std::string_view() : header_value.substr(semi + 1);
    while (!rest.empty()) {
        auto next = rest.find(';');
        auto segment = trim_ws(rest.substr(0, next));
        rest = next == std::string_view::npos ? std::string_view() : rest.substr(next + 1);
        if (segment.empty()) {
            continue;
        }
        auto aeq = segment.find('=');
        auto aname = trim_ws(segment.substr(0, aeq));
        if (aname.empty()) {
            continue;
        }
        CookieAttribute attr{std::string(aname), std::nullopt};
        if (aeq != std::string_view::npos) {
            attr.value = std::string(trim_ws(segment.substr(aeq + 1)));
        }
        rec.attributes.push_back(std::move(attr));
    }
    return rec;
}

std::string serialize_set_cookie(const SetCookieRecord& record) {
    std::string out = record.name + "=" + record.value;
    for (const auto& attr : record.attributes) {
        out += "; ";
        out += attr.name;
        if (attr.value) {
            out += "=";
            out += *attr.value;
        }
    }
    return out;
}

bool strip_persistence(SetCookieRecord& record) {
    auto removed = std::erase_if(record.attributes, [](const CookieAttribute& a) {
        return http::iequals(a.name, "expires") || http::iequals(a.name, "max-age");
    });
    return removed > 0;
}

}  // namespace filterplus::cookie
