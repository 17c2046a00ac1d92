#include "filterplus/policy/policy.hpp"

namespace filterplus::policy {

std::string_view to_string(CookiePolicy p) {
    switch (p) {
    case CookiePolicy::allow: return "allow";
    case CookiePolicy::session_only: return "session-only";
    case CookiePolicy::block: return "block";
    }
    return {};
}

std::string_view to_string(BinaryPolicy p) {
    return p == BinaryPolicy::allow ? "allow" : "block";
}

std::string_view to_string(NotificationPolicy p) {
    switch (p) {
    case NotificationPolicy::allow: return "allow";
    case NotificationPolicy::block: return "block";
    case NotificationPolicy::ask: return "ask";
    }
    return {};
}

std::string_view to_string(Field f) {
    switch (f) {
    case Field::cookies: return "cookies";
    case Field::images: return "images";
    case Field::javascript: return "javascript";
    case Field::popups: return "popups";
    case Field::notifications: return "notifications";
    }
    return {};
}

std::optional<CookiePolicy> parse_cookie_policy(std::string_view name) {
    if (name == "allow") return CookiePolicy::allow;
    if (name == "session-only") return CookiePolicy::session_only;
    if (name == "block") return CookiePolicy::block;
    return std::nullopt;
}

std::optional<BinaryPolicy> parse_binary_policy(std::string_view name) {
    if (name == "allow") return BinaryPolicy::allow;
    if (name == "block") return BinaryPolicy::block;
    return std::nullopt;
}

std::optional<NotificationPolicy> parse_notification_policy(std::string_view name) {
    if (name == "allow") return NotificationPolicy::allow;
    if (name == "block") return NotificationPolicy::block;
    if (name == "ask") return NotificationPolicy::ask;
    return std::nullopt;
}

std::optional<Field> parse_field(std::string_view name) {
    for (auto f : kFields) {
        if (to_string(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

std::string_view allowed_names(Field f) {
    switch (f) {
    case Field::cookies: return "allow|session-only|block";
    case Field::notifications: return "allow|block|ask";
    default: return "allow|block";
    }
}

bool PolicySet::is_set(Field f) const {
    switch (f) {
    case Field::cookies: return cookies.has_value();
    case Field::images: return images.has_value();
    case Field::javascript: return javascript.has_value();
    case Field::popups: return popups.has_value();
    case Field::notifications: return notifications.has_value();
    }
    return false;
}

bool PolicySet::empty() const {
    return !cookies && !images && !javascript && !popups && !notifications;
}

void PolicySet::merge_from(const PolicySet& update) {
    if (update.cookies) cookies = update.cookies;
    if (update.images) images = update.images;
    if (update.javascript) javascript = update.javascript;
    if (update.popups) popups = update.popups;
    if (update.notifications) notifications = update.notifications;
}

bool PolicySet::set(Field f, std::string_view name) {
    switch (f) {
    case Field::cookies:
        if (auto p = parse_cookie_policy(name)) { cookies = p; return true; }
        return false;
    case Field::images:
        if (auto p = parse_binary_policy(name)) { images = p; return true; }
        return false;
    case Field::javascript:
        if (auto p = parse_binary_policy(name)) { javascript = p; return true; }
        return false;
    case Field::popups:
        if (auto p = parse_binary_policy(name)) { popups = p; return true; }
        return false;
    case Field::notifications:
        if (auto p = parse_notification_policy(name)) { notifications = p; return true; }
        return false;
    }
    return false;
}

std::optional<std::string_view> PolicySet::name_of(Field f) const {
    switch (f) {
    case Field::cookies: if (cookies) return to_string(*cookies); break;
    case Field::images: if (images) return to_string(*images); break;
    case Field::javascript: if (javascript) return to_string(*javascript); break;
    case Field::popups: if (popups) return to_string(*popups); break;
    case Field::notifications: if (notifications) return to_string(*notifications); break;
    }
    return std::nullopt;
}

std::string_view EffectivePolicy::name_of(Field f) const {
    switch (f) {
    case Field::cookies: return to_string(cookies);
    case Field::images: return to_string(images);
    case Field::javascript: return to_string(javascript);
    case Field::popups: return to_string(popups);
    case Field::notifications: return to_string(notifications);
    }
    return {};
}

void EffectivePolicy::take(Field f, const PolicySet& from) {
    switch (f) {
    case Field::cookies: if (from.cookies) cookies = *from.cookies; break;
    case Field::images: if (from.images) images = *from.images; break;
    case Field::javascript: if (from.javascript) javascript = *from.javascript; break;
    case Field::popups: if (from.popups) popups = *from.popups; break;
    case Field::notifications: if (from.notifications) notifications = *from.notifications; break;
    }
}

PolicySet EffectivePolicy::as_policy_set() const {
    return {cookies, images, javascript, popups, notifications};
}

bool EffectivePolicy::blocks_everything() const {
    return cookies == CookiePolicy::block && images == BinaryPolicy::block &&
           javascript == BinaryPolicy::block && popups == BinaryPolicy::block &&
           notifications == NotificationPolicy::block;
}

EffectivePolicy overlay(EffectivePolicy base, const PolicySet& over) {
    for (auto f : kFields) {
        base.take(f, over);
    }
    return base;
}

}  // namespace filterplus::policy
