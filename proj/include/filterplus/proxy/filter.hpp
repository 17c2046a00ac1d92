#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "filterplus/events/event_log.hpp"
#include "filterplus/html/rewriter.hpp"
#include "filterplus/http/message.hpp"
#include "filterplus/http/url.hpp"
#include "filterplus/policy/rule_store.hpp"

namespace filterplus::proxy {

inline constexpr std::string_view kBlockedMarker = "X-FilterPlus-Blocked";
inline constexpr std::string_view kScriptCsp = "script-src 'none'";
inline constexpr std::string_view kNotificationsPermissions = "notifications=()";

// Everything known about one proxied request. The policy is resolved once,
// before any forwarding decision, and never re-read for this request.
struct RequestContext {
    std::string method;
    http::Url url;
    std::string http_version = "HTTP/1.1";
    http::HeaderList headers;
    std::string client_address;
    policy::Resolution resolution;

    const policy::EffectivePolicy& policy() const { return resolution.policy; }
};

RequestContext make_context(const http::RequestHead& head, http::Url url, std::string client_address,
                            const policy::RuleSet& rules, const policy::EffectivePolicy& baseline);

// One thing the filter did; becomes a FilterEvent once tagged with the URL
// and the pattern that supplied the policy.
struct Verdict {
    events::Category category;
    events::Action action;
    std::string detail;

    bool operator==(const Verdict&) const = default;
};

// Pattern responsible for a verdict's category; "baseline" when no rule.
std::string matched_pattern(const policy::Resolution& resolution, events::Category category);

struct BlockedResponse {
    int status;
    events::Category category;
};

// Empty-bodied, uncacheable response carrying the marker header.
http::ResponseHead blocked_head(const BlockedResponse& blocked);

struct ForwardRequest {
    http::RequestHead head;  // origin-form target, ready for the origin server
};

struct RequestDecision {
    std::variant<ForwardRequest, BlockedResponse> outcome;
    std::vector<Verdict> verdicts;

    bool forwarded() const { return std::holds_alternative<ForwardRequest>(outcome); }
};

RequestDecision filter_request(const RequestContext& ctx);

enum class BodyAction { pass, drop, rewrite_html };

struct ResponsePlan {
    http::ResponseHead head;  // hop-by-hop and framing headers removed
    BodyAction body = BodyAction::pass;
    html::RewritePolicy rewrite;
    bool ascii_compatible = true;
    std::vector<Verdict> verdicts;
};

ResponsePlan filter_response(const RequestContext& ctx, const http::ResponseHead& origin);

// Events for what a finished rewrite removed: one per removal class.
std::vector<Verdict> rewrite_verdicts(const html::Removals& removals);

html::RewritePolicy rewrite_policy_for(const policy::EffectivePolicy& policy);

bool is_image_extension(std::string_view ext);
bool is_script_extension(std::string_view ext);
bool is_script_media_type(std::string_view media_type);
bool is_html_media_type(std::string_view media_type);
// Media range with the highest q in an Accept header (first on ties).
std::string preferred_accept_type(std::string_view accept);

}  // namespace filterplus::proxy
