#include "filterplus/cookie/cookie.hpp"

namespace filterplus::cookie {

using policy::CookiePolicy;

CookieResult apply_cookie_policy(Direction direction, const http::HeaderList& headers, CookiePolicy policy) {
    CookieResult result;
    if (policy == CookiePolicy::allow) {
        result.headers = headers;
        return result;
    }
    result.headers.reserve(headers.size());
    for (const auto& header : headers) {
        if (direction == Direction::request) {
            if (policy == CookiePolicy::block && http::iequals(header.name, "cookie")) {
                result.edits.push_back({EditKind::removed, header.name, {}});
                continue;
            }
            result.headers.push_back(header);
            continue;
        }
        if (!http::iequals(header.name, "set-cookie")) {
            result.headers.push_back(header);
            continue;
        }
        auto record = parse_set_cookie(header.value);
        if (!record) {
            result.edits.push_back({EditKind::unparseable, header.name, {}});
            continue;
        }
        if (policy == CookiePolicy::block) {
            result.edits.push_back({EditKind::removed, header.name, record->name});
            continue;
        }
        if (strip_persistence(*record)) {
            result.headers.push_back({header.name, serialize_set_cookie(*record)});
            result.edits.push_back({EditKind::modified, header.name, record->name});
        } else {
            result.headers.push_back(header);
        }
    }
    return result;
}

}  // namespace filterplus::cookie
