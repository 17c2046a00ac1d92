#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace filterplus::policy {

enum class CookiePolicy { allow, session_only, block };
enum class BinaryPolicy { allow, block };
enum class NotificationPolicy { allow, block, ask };

// The five per-site categories, in canonical order.
enum class Field { cookies, images, javascript, popups, notifications };
inline constexpr std::array<Field, 5> kFields = {
    Field::cookies, Field::images, Field::javascript, Field::popups, Field::notifications,
};

std::string_view to_string(CookiePolicy p);
std::string_view to_string(BinaryPolicy p);
std::string_view to_string(NotificationPolicy p);
std::string_view to_string(Field f);

// Closed enums: an unknown name yields nullopt, never a default.
std::optional<CookiePolicy> parse_cookie_policy(std::string_view name);
std::optional<BinaryPolicy> parse_binary_policy(std::string_view name);
std::optional<NotificationPolicy> parse_notification_policy(std::string_view name);
std::optional<Field> parse_field(std::string_view name);

// Policy names that are legal for a field, e.g. "allow|session-only|block".
std::string_view allowed_names(Field f);

// A partial set of category settings; an unset field means "inherit".
struct PolicySet {
    std::optional<CookiePolicy> cookies;
    std::optional<BinaryPolicy> images;
    std::optional<BinaryPolicy> javascript;
    std::optional<BinaryPolicy> popups;
    std::optional<NotificationPolicy> notifications;

    bool is_set(Field f) const;
    bool empty() const;
    // Fields set in `update` overwrite ours; unset ones leave ours intact.
    void merge_from(const PolicySet& update);
    // Sets one field from its wire name; returns false for an illegal name.
    bool set(Field f, std::string_view name);
    // Wire name of a set field.
    std::optional<std::string_view> name_of(Field f) const;

    bool operator==(const PolicySet&) const = default;
};

// Fully resolved settings: every field present.
struct EffectivePolicy {
    CookiePolicy cookies = CookiePolicy::allow;
    BinaryPolicy images = BinaryPolicy::allow;
    BinaryPolicy javascript = BinaryPolicy::allow;
    BinaryPolicy popups = BinaryPolicy::allow;
    NotificationPolicy notifications = NotificationPolicy::ask;

    // Unconfigured-browser defaults: everything allowed, notifications ask.
    static EffectivePolicy builtin_baseline() { return {}; }

    std::string_view name_of(Field f) const;
    // Copies field f from a PolicySet where it is set.
    void take(Field f, const PolicySet& from);
    PolicySet as_policy_set() const;
    // Every category at its most restrictive variant.
    bool blocks_everything() const;

    bool operator==(const EffectivePolicy&) const = default;
};

EffectivePolicy overlay(EffectivePolicy base, const PolicySet& over);

}  // namespace filterplus::policy
