#include <doctest.h>

#include "filterplus/proxy/filter.hpp"

using namespace filterplus;
using namespace filterplus::proxy;
using events::Action;
using events::Category;
using policy::BinaryPolicy;
using policy::CookiePolicy;
using policy::NotificationPolicy;

namespace {

RequestContext context(const std::string& url, const policy::EffectivePolicy& p, http::HeaderList headers = {}) {
    http::RequestHead head{"GET", url, "HTTP/1.1", std::move(headers)};
    policy::RuleSet rules;
    return make_context(head, http::parse_absolute_url(url), "127.0.0.1", rules, p);
}

policy::EffectivePolicy with(void (*edit)(policy::EffectivePolicy&)) {
    policy::EffectivePolicy p = policy::EffectivePolicy::builtin_baseline();
    edit(p);
    return p;
}

http::ResponseHead response(std::string content_type, http::HeaderList extra = {}) {
    http::ResponseHead h;
    h.headers = {{"Content-Type", std::move(content_type)}, {"Content-Length", "10"}};
    for (auto& e : extra) {
        h.headers.push_back(e);
    }
    return h;
}

bool has_value(const http::HeaderList& h, std::string_view name, std::string_view value) {
    for (const auto& x : h) {
        if (http::iequals(x.name, name) && x.value == value) {
            return true;
        }
    }
    return false;
}

const auto kImagesBlocked = with([](policy::EffectivePolicy& p) { p.images = BinaryPolicy::block; });
const auto kScriptsBlocked = with([](policy::EffectivePolicy& p) { p.javascript = BinaryPolicy::block; });
const auto kPopupsBlocked = with([](policy::EffectivePolicy& p) { p.popups = BinaryPolicy::block; });

}  // namespace

TEST_SUITE("filter") {

TEST_CASE("image requests are answered with 204 under images=Block") {
    auto d = filter_request(context("http://s.test/pic.png", kImagesBlocked));
    REQUIRE_FALSE(d.forwarded());
    auto blocked = std::get<BlockedResponse>(d.outcome);
    CHECK(blocked.status == 204);
    auto head = blocked_head(blocked);
    CHECK(has_value(head.headers, "X-FilterPlus-Blocked", "images"));
    CHECK(has_value(head.headers, "Cache-Control", "no-store"));
    REQUIRE(d.verdicts.size() == 1);
    CHECK(d.verdicts[0].category == Category::images);

    auto by_accept = filter_request(context("http://s.test/thumb?id=1", kImagesBlocked,
                                            {{"Accept", "image/avif,image/webp,*/*;q=0.8"}}));
    CHECK_FALSE(by_accept.forwarded());
    auto page = filter_request(context("http://s.test/", kImagesBlocked,
                                       {{"Accept", "text/html,application/xhtml+xml,image/webp,*/*;q=0.8"}}));
    CHECK(page.forwarded());
    CHECK(filter_request(context("http://s.test/pic.png", policy::EffectivePolicy{})).forwarded());
}

TEST_CASE("script requests are answered with 403 under javascript=Block") {
    auto d = filter_request(context("http://s.test/app.js?v=2", kScriptsBlocked));
    REQUIRE_FALSE(d.forwarded());
    CHECK(std::get<BlockedResponse>(d.outcome).status == 403);
    CHECK(has_value(blocked_head(std::get<BlockedResponse>(d.outcome)).headers, "X-FilterPlus-Blocked", "javascript"));
    CHECK_FALSE(filter_request(context("http://s.test/m.MJS", kScriptsBlocked)).forwarded());
    CHECK(filter_request(context("http://s.test/app.json", kScriptsBlocked)).forwarded());
}

TEST_CASE("all-Allow forwards unchanged except hop-by-hop headers") {
    http::HeaderList h = {{"Host", "s.test"},       {"User-Agent", "t"},        {"Cookie", "a=1"},
                          {"Accept-Encoding", "gzip"}, {"Proxy-Connection", "keep-alive"}, {"Connection", "keep-alive"}};
    auto d = filter_request(context("http://s.test/page.html?q=1", policy::EffectivePolicy{}, h));
    REQUIRE(d.forwarded());
    const auto& fwd = std::get<ForwardRequest>(d.outcome).head;
    CHECK(fwd.target == "/page.html?q=1");
    CHECK(fwd.headers == http::HeaderList{{"Host", "s.test"},
                                          {"User-Agent", "t"},
                                          {"Cookie", "a=1"},
                                          {"Accept-Encoding", "gzip"},
                                          {"Connection", "close"}});
    CHECK(d.verdicts.empty());
}

TEST_CASE("rewritable requests ask for identity encoding") {
    auto d = filter_request(context("http://s.test/", kScriptsBlocked, {{"Accept-Encoding", "gzip, br"}}));
    REQUIRE(d.forwarded());
    CHECK(has_value(std::get<ForwardRequest>(d.outcome).head.headers, "Accept-Encoding", "identity"));
}

TEST_CASE("request cookies under Block") {
    auto p = with([](policy::EffectivePolicy& e) { e.cookies = CookiePolicy::block; });
    auto d = filter_request(context("http://s.test/", p, {{"Cookie", "id=1"}}));
    REQUIRE(d.forwarded());
    CHECK_FALSE(http::has_header(std::get<ForwardRequest>(d.outcome).head.headers, "cookie"));
    REQUIRE(d.verdicts.size() == 1);
    CHECK(d.verdicts[0].category == Category::cookies);
}

TEST_CASE("HTML under javascript=Block is rewritten and carries the CSP") {
    auto ctx = context("http://s.test/", kScriptsBlocked);
    auto plan = filter_response(ctx, response("text/html; charset=utf-8"));
    CHECK(plan.body == BodyAction::rewrite_html);
    CHECK(plan.rewrite.strip_scripts);
    CHECK(has_value(plan.head.headers, "Content-Security-Policy", "script-src 'none'"));
    CHECK_FALSE(http::has_header(plan.head.headers, "content-length"));
}

TEST_CASE("popups=Block adds the sandbox CSP") {
    auto plan = filter_response(context("http://s.test/", kPopupsBlocked), response("text/html"));
    CHECK(has_value(plan.head.headers, "Content-Security-Policy", "sandbox allow-scripts allow-same-origin allow-forms"));
    CHECK(plan.rewrite.strip_popup_targets);

    auto both = with([](policy::EffectivePolicy& e) {
        e.popups = BinaryPolicy::block;
        e.javascript = BinaryPolicy::block;
    });
    auto plan2 = filter_response(context("http://s.test/", both), response("text/html"));
    CHECK(has_value(plan2.head.headers, "Content-Security-Policy", "sandbox allow-same-origin allow-forms"));
    CHECK(has_value(plan2.head.headers, "Content-Security-Policy", "script-src 'none'"));
}

TEST_CASE("notifications") {
    auto b = with([](policy::EffectivePolicy& e) { e.notifications = NotificationPolicy::block; });
    auto plan = filter_response(context("http://s.test/", b), response("text/html"));
    CHECK(has_value(plan.head.headers, "Permissions-Policy", "notifications=()"));

    auto ask = filter_response(context("http://s.test/", policy::EffectivePolicy{}), response("text/html"));
    CHECK_FALSE(http::has_header(ask.head.headers, "permissions-policy"));
    REQUIRE(ask.verdicts.size() == 1);
    CHECK(ask.verdicts[0].action == Action::would_ask);

    auto allow = with([](policy::EffectivePolicy& e) { e.notifications = NotificationPolicy::allow; });
    auto plain = filter_response(context("http://s.test/", allow), response("text/html"));
    CHECK(plain.body == BodyAction::pass);
    CHECK(plain.verdicts.empty());
    CHECK(plain.head.headers == response("text/html").headers);
}

TEST_CASE("image and script responses") {
    auto img = filter_response(context("http://s.test/x", kImagesBlocked), response("image/png"));
    CHECK(img.head.status == 204);
    CHECK(img.body == BodyAction::drop);
    CHECK(has_value(img.head.headers, "X-FilterPlus-Blocked", "images"));

    auto js = filter_response(context("http://s.test/x", kScriptsBlocked), response("application/javascript"));
    CHECK(js.head.status == 200);
    CHECK(js.body == BodyAction::drop);
    CHECK(has_value(js.head.headers, "Content-Length", "0"));
    CHECK(is_script_media_type("text/javascript"));
    CHECK(is_script_media_type("text/ecmascript"));
    CHECK_FALSE(is_script_media_type("text/html"));
}

TEST_CASE("compressed HTML is not rewritten but headers still apply") {
    auto plan = filter_response(context("http://s.test/", kScriptsBlocked),
                                response("text/html", {{"Content-Encoding", "gzip"}}));
    CHECK(plan.body == BodyAction::pass);
    CHECK(has_value(plan.head.headers, "Content-Security-Policy", "script-src 'none'"));
    bool bypassed = false;
    for (const auto& v : plan.verdicts) {
        bypassed |= v.action == Action::bypassed;
    }
    CHECK(bypassed);
}

TEST_CASE("UTF-16 charset disables rewriting") {
    auto plan = filter_response(context("http://s.test/", kScriptsBlocked), response("text/html; charset=UTF-16LE"));
    CHECK(plan.body == BodyAction::rewrite_html);
    CHECK_FALSE(plan.ascii_compatible);
}

TEST_CASE("response cookies") {
    auto p = with([](policy::EffectivePolicy& e) { e.cookies = CookiePolicy::session_only; });
    auto plan = filter_response(context("http://s.test/", p),
                                response("text/plain", {{"Set-Cookie", "id=1; Expires=Wed, 21 Oct 2026 07:28:00 GMT; Path=/"}}));
    CHECK(has_value(plan.head.headers, "Set-Cookie", "id=1; Path=/"));
    REQUIRE(plan.verdicts.size() == 1);
    CHECK(plan.verdicts[0].action == Action::modified);
}

TEST_CASE("accept header preference") {
    CHECK(preferred_accept_type("text/html;q=0.9, image/png") == "image/png");
    CHECK(preferred_accept_type("image/webp;q=0.5, text/css;q=0.6") == "text/css");
    CHECK(preferred_accept_type("IMAGE/PNG") == "image/png");
    CHECK(preferred_accept_type("") == "");
}

TEST_CASE("matched pattern follows the category's provenance") {
    policy::RuleSet rules;
    policy::PolicySet ps;
    ps.javascript = BinaryPolicy::block;
    rules.upsert(policy::SitePattern::parse("*.s.test"), ps, policy::now_seconds());
    http::RequestHead head{"GET", "http://a.s.test/", "HTTP/1.1", {}};
    auto ctx = make_context(head, http::parse_absolute_url(head.target), "c", rules, {});
    CHECK(matched_pattern(ctx.resolution, Category::javascript) == "*.s.test");
    CHECK(matched_pattern(ctx.resolution, Category::images) == "baseline");
    CHECK(matched_pattern(ctx.resolution, Category::tunnel) == "*.s.test");
}

}
