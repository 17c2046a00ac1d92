#include <doctest.h>

#include "filterplus/html/rewriter.hpp"
#include "filterplus/html/tokenizer.hpp"
#include "generators.hpp"
#include "retokenize.hpp"
#include "script_scan.hpp"

using namespace filterplus::html;

namespace {

std::string rewrite(std::string_view doc, RewritePolicy policy) {
    StreamRewriter r(policy);
    std::string out;
    r.feed(doc, out);
    r.finish(out);
    return out;
}

std::string rewrite_bytewise(std::string_view doc, RewritePolicy policy) {
    StreamRewriter r(policy);
    std::string out;
    for (char c : doc) {
        r.feed(std::string_view(&c, 1), out);
    }
    r.finish(out);
    return out;
}

constexpr RewritePolicy kScripts{true, false, false};
constexpr RewritePolicy kAll{true, true, true};

}  // namespace

TEST_SUITE("html") {

TEST_CASE("tokenizer examples") {
    auto t = oracle::tokenize_whole("<p>hi</p>");
    REQUIRE(t.size() == 3);
    CHECK(t[0].kind == TokenKind::start_tag);
    CHECK(t[0].name == "p");
    CHECK(t[1].kind == TokenKind::text);
    CHECK(t[1].data == "hi");
    CHECK(t[2].kind == TokenKind::end_tag);
    CHECK(t[2].name == "p");

    auto s = oracle::tokenize_whole("<script>a<b</script>");
    REQUIRE(s.size() == 3);
    CHECK(s[0].name == "script");
    CHECK(s[1].kind == TokenKind::raw_text);
    CHECK(s[1].data == "a<b");
    CHECK(s[2].kind == TokenKind::end_tag);
}

TEST_CASE("raw text ends only at the matching end tag, any case") {
    auto t = oracle::tokenize_whole("<STYLE>a</styl</stylex></Style >x");
    REQUIRE(t.size() == 4);
    CHECK(t[1].data == "a</styl</stylex>");
    CHECK(t[2].source() == "</Style >");
    CHECK(t[3].data == "x");
    auto ta = oracle::tokenize_whole("<textarea><b onclick=x></textarea>");
    REQUIRE(ta.size() == 3);
    CHECK(ta[1].kind == TokenKind::raw_text);
}

TEST_CASE("attributes keep name, value, quote and exact source") {
    auto t = oracle::tokenize_whole("<A HREF = 'x y' Data-Q=\"1\" bare checked/>");
    REQUIRE(t.size() == 1);
    const auto& tag = t[0];
    CHECK(tag.name == "a");
    CHECK(tag.self_closing);
    REQUIRE(tag.attributes.size() == 4);
    CHECK(tag.attributes[0].name == "href");
    CHECK(tag.attributes[0].value == "x y");
    CHECK(tag.attributes[0].quote == '\'');
    CHECK(tag.attributes[0].source == " HREF = 'x y'");
    CHECK(tag.attributes[0].source.substr(tag.attributes[0].value_offset, 3) == "x y");
    CHECK(tag.attributes[1].name == "data-q");
    CHECK(tag.attributes[1].value == "1");
    CHECK(tag.attributes[2].name == "bare");
    CHECK_FALSE(tag.attributes[2].value);
    CHECK(tag.attributes[3].name == "checked");
    CHECK_FALSE(tag.attributes[3].value);
    auto u = oracle::tokenize_whole("<p a=bare>");
    REQUIRE(u.size() == 1);
    CHECK(u[0].attributes[0].value == "bare");
    CHECK(u[0].attributes[0].quote == 0);
    CHECK(tag.source() == "<A HREF = 'x y' Data-Q=\"1\" bare checked/>");
}

TEST_CASE("comments, doctypes and bogus markup") {
    auto t = oracle::tokenize_whole("<!DOCTYPE html><!-- a -- b --><!--><!---><!-- x --!><?pi?><!x></><a<b>");
    std::vector<TokenKind> kinds;
    for (const auto& tok : t) {
        kinds.push_back(tok.kind);
    }
    CHECK(kinds == std::vector<TokenKind>{TokenKind::doctype, TokenKind::comment, TokenKind::comment,
                                          TokenKind::comment, TokenKind::comment, TokenKind::comment,
                                          TokenKind::comment, TokenKind::comment, TokenKind::start_tag});
    CHECK(t.back().name == "a<b");
}

TEST_CASE("malformed markup degrades to text and never loses bytes") {
    for (std::string_view doc : {"<", "</", "<a href='x", "<!-- open", "a < b", "<<>>", "<script>x", "</ a>", "<3"}) {
        auto t = oracle::tokenize_whole(doc);
        CHECK(oracle::reassemble(t) == doc);
    }
    auto t = oracle::tokenize_whole("<a href='x");
    REQUIRE(t.size() == 1);
    CHECK(t[0].kind == TokenKind::text);
}

TEST_CASE("long text is split at fixed offsets and buffering stays bounded") {
    std::string doc(3 * Tokenizer::kMaxTextRun + 17, 'x');
    doc = "<p>" + doc + "</p>";
    auto whole = oracle::tokenize_whole(doc);
    REQUIRE(whole.size() == 6);
    CHECK(whole[1].data.size() == Tokenizer::kMaxTextRun);
    CHECK(whole[4].data.size() == 17);

    Tokenizer tok;
    std::vector<Token> out;
    for (std::size_t i = 0; i < doc.size(); i += 1000) {
        tok.feed(std::string_view(doc).substr(i, 1000), out);
    }
    tok.finish(out);
    CHECK(out == whole);
    CHECK(tok.high_water() <= Tokenizer::kMaxTextRun);
}

TEST_CASE("generated documents tokenize identically under random splits") {
    gen::Rng rng(7);
    for (int d = 0; d < 200; ++d) {
        auto doc = gen::html_document(rng, rng.between(10, 3000));
        auto whole = oracle::tokenize_whole(doc);
        REQUIRE(oracle::reassemble(whole) == doc);
        for (int p = 0; p < 5; ++p) {
            std::vector<std::size_t> cuts;
            for (std::size_t at = rng.between(0, 8); at < doc.size(); at += rng.between(1, 40)) {
                cuts.push_back(at);
            }
            auto split = oracle::tokenize_split(doc, cuts);
            INFO("doc " << d << " partition " << p);
            CHECK(oracle::first_difference(whole, split) == -1);
        }
    }
}

TEST_CASE("rewriter examples") {
    CHECK(rewrite("<p>hi</p><script>alert(1)</script>", kScripts) == "<p>hi</p>");
    CHECK(rewrite("<a href='x' onclick='f()' target='_blank'>", {true, false, true}) == "<a href='x'>");
    CHECK(rewrite("<img src=a.png alt=x><picture><source srcset=b></picture><p>t</p>", {false, true, false}) ==
          "<p>t</p>");
    CHECK(rewrite("<a target=_NEW href=/>x</a><a target=_self>", {false, false, true}) == "<a href=/>x</a><a target=_self>");
}

TEST_CASE("javascript URLs are emptied after normalization") {
    CHECK(rewrite("<a href=\"javascript:alert(1)\">", kScripts) == "<a href=\"\">");
    CHECK(rewrite("<a href='  JaVaScRiPt:x'>", kScripts) == "<a href=''>");
    CHECK(rewrite("<a href=java&#x09;script:x>", kScripts) == "<a href=\"\">");
    CHECK(rewrite("<form action=\"&#106;avascript:x\"><button formaction=javascript:y>", kScripts) ==
          "<form action=\"\"><button formaction=\"\">");
    CHECK(rewrite("<a href=\"/javascript:x\">", kScripts) == "<a href=\"/javascript:x\">");
    CHECK(rewrite("<a title=\"javascript:x\">", kScripts) == "<a title=\"javascript:x\">");
    CHECK(is_javascript_url("\x01java\nscript:1"));
    CHECK(is_javascript_url("javascript&colon;1"));
    CHECK_FALSE(is_javascript_url("http://javascript:1"));
}

TEST_CASE("removing an attribute never glues its neighbours together") {
    CHECK(rewrite("<a href=\"x\"onclick=\"f()\"title=\"t\">", kScripts) == "<a href=\"x\" title=\"t\">");
    CHECK(rewrite("<a onclick=f title=t>", kScripts) == "<a title=t>");
    CHECK(rewrite("<a/onclick=x/title=t>", kScripts) == "<a>");
    CHECK(rewrite("<a/onclick=x title=t>", kScripts) == "<a title=t>");
    CHECK(rewrite("<a onclick=x>", kScripts) == "<a>");
    CHECK(rewrite("<a id=x onclick/title=t>", kScripts) == "<a id=x /title=t>");
    CHECK(rewrite("<a id=x onclick=\"y\"/>", kScripts) == "<a id=x />");
    CHECK(rewrite("<a id=\"x\" onclick=\"y\"/>", kScripts) == "<a id=\"x\"/>");
    CHECK(rewrite("<a t onclick=1 ='v' onfocus=2>", kScripts) == "<a t>");
    CHECK(rewrite("<a t=1 onclick=1 =v>", kScripts) == "<a t=1 =v>");
}

TEST_CASE("a tag cut off by the end of input is dropped when rewriting") {
    auto t = oracle::tokenize_whole("ab<a href='x");
    REQUIRE(t.size() == 2);
    CHECK(t[1].data == "<a href='x");
    CHECK(rewrite("<p>ok<ScRIPt alt=\"x <a onclick=1>", kScripts) == "<p>ok");
    CHECK(rewrite("<p>ok<a href='x", kScripts) == "<p>ok");
    CHECK(rewrite("<p>ok<a href='x", {}) == "<p>ok<a href='x");
    CHECK(rewrite("<p>ok<", kScripts) == "<p>ok<");
}

TEST_CASE("script markup in inert content is neutralized") {
    CHECK(rewrite("<!-- <script>x</script> --><p>", kScripts) == "<p>");
    CHECK(rewrite("<textarea><script>x</script></textarea>", kScripts) ==
          "<textarea>&lt;script>x</script></textarea>");
    CHECK(rewrite("<div =\"<script>\">", kScripts) == "<div>\">");
    CHECK(rewrite("<a<script>x", kScripts) == "x");
    CHECK(rewrite("</p title='<script>'>", kScripts) == "</p>");
    CHECK(rewrite("<style>a:after{content:'<SCRIPT>'}</style>", kScripts) ==
          "<style>a:after{content:'\\3c SCRIPT>'}</style>");
    CHECK(rewrite("<div title=\"<script>\">", kScripts) == "<div title=\"&lt;script>\">");
    CHECK(rewrite("<div title=<script>", kScripts) == "<div title=\"&lt;script\">");
    CHECK(rewrite("<p title=<script\"x=\"onclick=1>", kScripts) == "<p title=\"&lt;script&quot;x=&quot;onclick=1\">");
    CHECK(rewrite("<scriptx>ok</scriptx>", kScripts) == "<scriptx>ok</scriptx>");
}

TEST_CASE("dropping an element cannot join text into new markup") {
    CHECK(rewrite("<<script>x</script>script>alert(1)", kScripts) == "&lt;script>alert(1)");
    CHECK(rewrite("<<img src=x>a onclick=1>", kAll) == "&lt;a onclick=1>");
    CHECK(rewrite("<<!--<script>-->script>", kScripts) == "&lt;script>");
    CHECK(rewrite("a <<b>c", kAll) == "a <<b>c");
    CHECK(rewrite("x <", kAll) == "x <");
    CHECK(rewrite_bytewise("<<script>x</script>script>alert(1)", kScripts) == "&lt;script>alert(1)");
}

TEST_CASE("stray script end tags go too") {
    CHECK(rewrite("a</script>b", kScripts) == "ab");
    CHECK(rewrite("<SCRIPT src=x></SCRIPT >z", kScripts) == "z");
    CHECK(rewrite("<script>never closed", kScripts) == "");
}

TEST_CASE("removals are reported per class") {
    StreamRewriter r(kAll);
    std::string out;
    r.feed("<script></script><a onclick=1 target=_blank href='javascript:x'><img>", out);
    r.finish(out);
    CHECK(r.removals().has(Removal::script_elements));
    CHECK(r.removals().has(Removal::event_handlers));
    CHECK(r.removals().has(Removal::javascript_urls));
    CHECK(r.removals().has(Removal::image_elements));
    CHECK(r.removals().has(Removal::popup_targets));
    CHECK_FALSE(r.removals().has(Removal::script_markup));

    StreamRewriter quiet(kAll);
    std::string q;
    quiet.feed("<p>nothing</p>", q);
    quiet.finish(q);
    CHECK(quiet.removals().empty());
    CHECK(q == "<p>nothing</p>");
}

TEST_CASE("UTF-16 input passes through untouched") {
    std::string doc = "\xFF\xFE<\0s\0c\0r\0i\0p\0t\0>\0";
    StreamRewriter r(kAll);
    std::string out;
    r.feed(doc.substr(0, 1), out);
    r.feed(doc.substr(1), out);
    r.finish(out);
    CHECK(r.passed_through());
    CHECK(out == doc);

    StreamRewriter declared(kAll, false);
    std::string o2;
    declared.feed("<script>x</script>", o2);
    declared.finish(o2);
    CHECK(declared.passed_through());
    CHECK(o2 == "<script>x</script>");
}

TEST_CASE("the scanner oracle flags what it should") {
    CHECK(oracle::scan_for_scripts("<SCRIPT>").script_start_tags == 1);
    CHECK(oracle::scan_for_scripts("x<script").script_start_tags == 1);
    CHECK(oracle::scan_for_scripts("<scriptx>").script_start_tags == 0);
    CHECK(oracle::scan_for_scripts("<a ONCLICK=x>").event_handlers == 1);
    CHECK(oracle::scan_for_scripts("<a href='>' onload=x>").event_handlers == 1);
    CHECK(oracle::scan_for_scripts("<a title=\"x\"onclick=y>").event_handlers == 1);
    CHECK(oracle::scan_for_scripts("<!-- <a onclick=x> -->").event_handlers == 0);
    CHECK(oracle::scan_for_scripts("<textarea><a onclick=x></textarea>").event_handlers == 0);
    CHECK(oracle::scan_for_scripts("<a onclick=x").event_handlers == 0);
    CHECK(oracle::scan_for_scripts("</a onclick=x>").event_handlers == 0);
    CHECK(oracle::scan_for_scripts("<p>plain</p>").clean());
}

TEST_CASE("generated documents: identity without flags, clean with strip_scripts") {
    gen::Rng rng(99);
    for (int d = 0; d < 300; ++d) {
        auto doc = gen::html_document(rng, rng.between(10, 4000));
        INFO("doc " << d << ": " << doc.substr(0, 200));
        CHECK(rewrite(doc, {}) == doc);
        for (auto policy : {kScripts, kAll, RewritePolicy{true, true, false}}) {
            auto out = rewrite(doc, policy);
            auto scan = oracle::scan_for_scripts(out);
            INFO((scan.samples.empty() ? std::string() : scan.samples.front()));
            CHECK(scan.clean());
            CHECK(rewrite_bytewise(doc, policy) == out);
        }
    }
}

}
