#include "filterplus/proxy/filter.hpp"

#include <array>
#include <charconv>

#include "filterplus/cookie/cookie.hpp"

namespace filterplus::proxy {

using events::Action;
using events::Category;
using policy::BinaryPolicy;
using policy::Field;

namespace {

constexpr std::array<std::string_view, 9> kImageExtensions = {
    "png", "jpg", "jpeg", "gif", "webp", "svg", "ico", "bmp", "avif",
};
constexpr std::array<std::string_view, 2> kScriptExtensions = {"js", "mjs"};

std::optional<Field> field_for(Category c) {
    switch (c) {
    case Category::cookies: return Field::cookies;
    case Category::images: return Field::images;
    case Category::javascript: return Field::javascript;
    case Category::popups: return Field::popups;
    case Category::notifications: return Field::notifications;
    default: return std::nullopt;
    }
}

void add_cookie_verdicts(std::vector<Verdict>& out, const std::vector<cookie::CookieEdit>& edits) {
    for (const auto& e : edits) {
        switch (e.kind) {
        case cookie::EditKind::removed:
            out.push_back({Category::cookies, Action::blocked, e.header + " " + e.cookie_name + " removed"});
            break;
        case cookie::EditKind::modified:
            out.push_back({Category::cookies, Action::modified, e.header + " " + e.cookie_name + " made session-only"});
            break;
        case cookie::EditKind::unparseable:
            out.push_back({Category::cookies, Action::blocked, "unparseable " + e.header + " dropped"});
            break;
        }
    }
}

// Anything not obviously a subresource of a non-rewritable kind.
bool may_be_rewritable(const RequestContext& ctx) {
    auto ext = http::path_extension(ctx.url.path_only());
    return !is_image_extension(ext) && !is_script_extension(ext) && ext != "css";
}

bool non_ascii_charset(std::string_view content_type) {
    auto lowered = http::to_lower(content_type);
    auto pos = lowered.find("charset=");
    if (pos == std::string::npos) {
        return false;
    }
    auto charset = std::string_view(lowered).substr(pos + 8);
    if (!charset.empty() && (charset.front() == '"' || charset.front() == '\'')) {
        charset.remove_prefix(1);
    }
    return charset.starts_with("utf-16") || charset.starts_with("utf-32") || charset.starts_with("ucs-2");
}

}  // namespace

RequestContext make_context(const http::RequestHead& head, http::Url url, std::string client_address,
                            const policy::RuleSet& rules, const policy::EffectivePolicy& baseline) {
    RequestContext ctx;
    ctx.method = head.method;
    ctx.http_version = head.version;
    ctx.headers = head.headers;
    ctx.client_address = std::move(client_address);
    ctx.resolution = rules.resolve(url.host, baseline);
    ctx.url = std::move(url);
    return ctx;
}

std::string matched_pattern(const policy::Resolution& resolution, Category category) {
    if (auto f = field_for(category)) {
        return resolution.source(*f).pattern;
    }
    // Tunnel and upstream events: the most specific rule that applied at all.
    const policy::FieldSource* best = nullptr;
    for (const auto& src : resolution.provenance) {
        if (src.tier != policy::Tier::baseline && (!best || src.tier < best->tier ||
                                                   (src.tier == best->tier && src.pattern.size() > best->pattern.size()))) {
            best = &src;
        }
    }
    return best ? best->pattern : "baseline";
}

http::ResponseHead blocked_head(const BlockedResponse& blocked) {
    http::ResponseHead head;
    head.status = blocked.status;
    head.reason = std::string(http::default_reason(blocked.status));
    head.headers = {
        {std::string(kBlockedMarker), std::string(events::to_string(blocked.category))},
        {"Content-Length", "0"},
        {"Cache-Control", "no-store"},
    };
    return head;
}

RequestDecision filter_request(const RequestContext& ctx) {
    const auto& p = ctx.policy();
    RequestDecision decision{ForwardRequest{}, {}};

    auto ext = http::path_extension(ctx.url.path_only());
    if (p.images == BinaryPolicy::block) {
        auto accept = http::find_header(ctx.headers, "accept");
        bool image_accept = accept && preferred_accept_type(*accept).starts_with("image/");
        if (is_image_extension(ext) || image_accept) {
            decision.outcome = BlockedResponse{204, Category::images};
            decision.verdicts.push_back({Category::images, Action::blocked, "image request"});
            return decision;
        }
    }
    if (p.javascript == BinaryPolicy::block && is_script_extension(ext)) {
        decision.outcome = BlockedResponse{403, Category::javascript};
        decision.verdicts.push_back({Category::javascript, Action::blocked, "script request"});
        return decision;
    }

    auto cookies = cookie::apply_cookie_policy(cookie::Direction::request, ctx.headers, p.cookies);
    add_cookie_verdicts(decision.verdicts, cookies.edits);

    ForwardRequest fwd;
    fwd.head.method = ctx.method;
    fwd.head.target = ctx.url.path;
    fwd.head.version = "HTTP/1.1";
    fwd.head.headers = std::move(cookies.headers);
    auto framing_chunked = http::header_tokens(fwd.head.headers, "transfer-encoding");
    http::strip_hop_by_hop(fwd.head.headers);
    http::remove_header(fwd.head.headers, "expect");
    if (!framing_chunked.empty()) {
        fwd.head.headers.push_back({"Transfer-Encoding", "chunked"});
    }
    if (auto host = http::find_header(fwd.head.headers, "host"); !host || *host != ctx.url.authority()) {
        http::set_header(fwd.head.headers, "Host", ctx.url.authority());
    }
    if (rewrite_policy_for(p).any() && may_be_rewritable(ctx) && http::has_header(fwd.head.headers, "accept-encoding")) {
        http::set_header(fwd.head.headers, "Accept-Encoding", "identity");
    }
    fwd.head.headers.push_back({"Connection", "close"});
    decision.outcome = std::move(fwd);
    return decision;
}

ResponsePlan filter_response(const RequestContext& ctx, const http::ResponseHead& origin) {
    const auto& p = ctx.policy();
    ResponsePlan plan;

    auto content_type = http::find_header(origin.headers, "content-type").value_or("");
    auto type = http::media_type(content_type);

    if (p.images == BinaryPolicy::block && type.starts_with("image/")) {
        plan.head = blocked_head({204, Category::images});
        plan.body = BodyAction::drop;
        plan.verdicts.push_back({Category::images, Action::blocked, "image response " + type});
        return plan;
    }

    auto cookies = cookie::apply_cookie_policy(cookie::Direction::response, origin.headers, p.cookies);
    add_cookie_verdicts(plan.verdicts, cookies.edits);
    plan.head = origin;
    plan.head.version = "HTTP/1.1";
    plan.head.headers = std::move(cookies.headers);
    http::strip_hop_by_hop(plan.head.headers);

    if (p.javascript == BinaryPolicy::block && is_script_media_type(type)) {
        plan.body = BodyAction::drop;
        http::set_header(plan.head.headers, "Content-Length", "0");
        plan.head.headers.push_back({std::string(kBlockedMarker), "javascript"});
        plan.head.headers.push_back({"Cache-Control", "no-store"});
        plan.verdicts.push_back({Category::javascript, Action::blocked, "script response " + type});
        return plan;
    }

    if (!is_html_media_type(type)) {
        return plan;
    }

    plan.rewrite = rewrite_policy_for(p);
    if (plan.rewrite.any()) {
        auto encoding = http::to_lower(http::trim(http::find_header(origin.headers, "content-encoding").value_or("")));
        if (!encoding.empty() && encoding != "identity") {
            // Compressed despite the identity request: headers still apply.
            plan.verdicts.push_back({p.javascript == BinaryPolicy::block ? Category::javascript
                                     : p.images == BinaryPolicy::block ? Category::images
                                                                       : Category::popups,
                                     Action::bypassed, "body not rewritten: content-encoding " + encoding});
        } else {
            plan.body = BodyAction::rewrite_html;
            plan.ascii_compatible = !non_ascii_charset(content_type);
            http::remove_header(plan.head.headers, "content-length");
        }
    }

    if (p.javascript == BinaryPolicy::block) {
        plan.head.headers.push_back({"Content-Security-Policy", std::string(kScriptCsp)});
        plan.verdicts.push_back({Category::javascript, Action::blocked, "injected Content-Security-Policy: script-src 'none'"});
    }
    if (p.popups == BinaryPolicy::block) {
        std::string sandbox = p.javascript == BinaryPolicy::block ? "sandbox allow-same-origin allow-forms"
                                                                  : "sandbox allow-scripts allow-same-origin allow-forms";
        plan.head.headers.push_back({"Content-Security-Policy", sandbox});
        plan.verdicts.push_back({Category::popups, Action::blocked, "injected Content-Security-Policy: " + sandbox});
    }
    switch (p.notifications) {
    case policy::NotificationPolicy::block:
        plan.head.headers.push_back({"Permissions-Policy", std::string(kNotificationsPermissions)});
        plan.verdicts.push_back({Category::notifications, Action::blocked, "injected Permissions-Policy: notifications=()"});
        break;
    case policy::NotificationPolicy::ask:
        plan.verdicts.push_back({Category::notifications, Action::would_ask, "notifications allowed pending a decision"});
        break;
    case policy::NotificationPolicy::allow:
        break;
    }
    return plan;
}

std::vector<Verdict> rewrite_verdicts(const html::Removals& removals) {
    using html::Removal;
    std::vector<Verdict> out;
    auto add = [&](Removal r, Category c, Action a) {
        if (removals.has(r)) {
            out.push_back({c, a, std::string("removed ") + html::to_string(r)});
        }
    };
    add(Removal::script_elements, Category::javascript, Action::blocked);
    add(Removal::event_handlers, Category::javascript, Action::modified);
    add(Removal::javascript_urls, Category::javascript, Action::modified);
    add(Removal::script_markup, Category::javascript, Action::modified);
    add(Removal::image_elements, Category::images, Action::blocked);
    add(Removal::popup_targets, Category::popups, Action::modified);
    return out;
}

html::RewritePolicy rewrite_policy_for(const policy::EffectivePolicy& p) {
    return {p.javascript == BinaryPolicy::block, p.images == BinaryPolicy::block, p.popups == BinaryPolicy::block};
}

bool is_image_extension(std::string_view ext) {
    for (auto e : kImageExtensions) {
        if (e == ext) return true;
    }
    return false;
}

bool is_script_extension(std::string_view ext) {
    for (auto e : kScriptExtensions) {
        if (e == ext) return true;
    }
    return false;
}

bool is_script_media_type(std::string_view t) {
    return t == "application/javascript" || t == "text/javascript" || t == "application/x-javascript" ||
           t == "application/ecmascript" || t == "text/ecmascript" || t == "application/x-ecmascript" ||
           t == "text/jscript" || t == "text/x-javascript";
}

bool is_html_media_type(std::string_view t) {
    return t == "text/html" || t == "application/xhtml+xml";
}

std::string preferred_accept_type(std::string_view accept) {
    std::string best;
    double best_q = -1.0;
    while (!accept.empty()) {
        auto comma = accept.find(',');
        auto item = http::trim(accept.substr(0, comma));
        accept = comma == std::string_view::npos ? std::string_view() : accept.substr(comma + 1);
        if (item.empty()) {
            continue;
        }
        auto semi = item.find(';');
        auto type = http::to_lower(http::trim(item.substr(0, semi)));
        double q = 1.0;
        auto params = semi == std::string_view::npos ? std::string_view() : item.substr(semi + 1);
        while (!params.empty()) {
            auto next = params.find(';');
            auto param = http::trim(params.substr(0, next));
            params = next == std::string_view::npos ? std::string_view() : params.substr(next + 1);
            if (param.size() > 2 && (param[0] == 'q' || param[0] == 'Q') && param[1] == '=') {
                auto v = param.substr(2);
                double parsed = 0;
                auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
                q = ec == std::errc() ? parsed : 0.0;
            }
        }
        if (q > best_q) {
            best_q = q;
            best = std::move(type);
        }
    }
    return best;
}

}  // namespace filterplus::proxy
