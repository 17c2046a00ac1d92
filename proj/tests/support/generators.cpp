#include "generators.hpp"

#include <set>

namespace gen {

std::string Rng::mixed_case(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) && chance(0.3)) {
            c = static_cast<char>(c ^ 0x20);
        }
    }
    return out;
}

namespace {

std::string text_run(Rng& rng) {
    static const std::vector<std::string> words = {
        "lorem", "ipsum", " ", "\n", "caf\xC3\xA9", "&amp;", "&lt;script&gt;", "a < b", "x<", "<<", "< ",
        "5 > 3", "&#60;", "\t", "\xE2\x80\x94", "on", "onclick", "script", "javascript:", "=", "\"", "'",
    };
    std::string out;
    auto n = rng.between(1, 12);
    for (std::size_t i = 0; i < n; ++i) {
        out += rng.pick(words);
    }
    return out;
}

std::string quoted(Rng& rng, std::string_view value) {
    switch (rng.below(3)) {
    case 0: return "\"" + std::string(value) + "\"";
    case 1: return "'" + std::string(value) + "'";
    default: {
        std::string v(value);
        for (char& c : v) {
            if (c == ' ' || c == '>' || c == '"' || c == '\'' || c == '\t' || c == '\n') {
                c = '_';
            }
        }
        return v.empty() ? "x" : v;
    }
    }
}

std::string js_url(Rng& rng) {
    return std::string(rng.pick({"javascript:alert(1)", " JaVaScRiPt:void(0)", "java&#x09;script:x()",
                                 "&#106;avascript:x", "jav&#x0A;ascript:1", "javascript&colon;y",
                                 "\x01javascript:z", "javascript&#58;w", "  javascript :no"}));
}

std::string attribute(Rng& rng) {
    std::string name;
    std::string value;
    switch (rng.below(10)) {
    case 0:
    case 1:
        name = rng.mixed_case(rng.pick({"onclick", "onload", "onerror", "onmouseover", "on", "onfocus"}));
        value = rng.pick({"alert(1)", "x()", "", "a>b", "it's \"q\"", "<script>x</script>"});
        break;
    case 2:
        name = rng.mixed_case(rng.pick({"href", "src", "action", "formaction"}));
        value = rng.chance(0.5) ? js_url(rng) : std::string(rng.pick({"/a", "http://x.test/p?q=1", "#top", ""}));
        break;
    case 3:
        name = rng.mixed_case("target");
        value = rng.pick({"_blank", "_BLANK", "_new", "_self", " _blank ", "frame"});
        break;
    case 4:
        name = "title";
        value = rng.pick({"<script>alert(1)</script>", "<SCRIPT src=x>", "plain", "a&quot;b"});
        break;
    default:
        name = rng.pick({"class", "id", "data-x", "style", "alt", "width", "x-on", "aria-label"});
        value = text_run(rng);
        break;
    }
    std::string sep = std::string(rng.pick({" ", "  ", "\n", "\t", "/", " / "}));
    if (rng.chance(0.15)) {
        return sep + name;
    }
    std::string eq = std::string(rng.pick({"=", "=", " = ", "= "}));
    return sep + name + eq + quoted(rng, value);
}

std::string start_tag(Rng& rng, std::string_view name) {
    std::string out = "<" + rng.mixed_case(name);
    auto n = rng.below(5);
    for (std::size_t i = 0; i < n; ++i) {
        // Occasionally glue the next attribute straight onto a quoted value.
        auto a = attribute(rng);
        if (rng.chance(0.15) && !out.empty() && (out.back() == '"' || out.back() == '\'')) {
            auto start = a.find_first_not_of(" \n\t/");
            if (start != std::string::npos) {
                a = a.substr(start);
            }
        }
        out += a;
    }
    out += rng.pick({">", ">", " >", "/>", " />"});
    return out;
}

std::string fragment(Rng& rng) {
    static const std::vector<std::string> elements = {"div", "p", "a", "span", "img", "picture", "source",
                                                      "image", "form", "button", "iframe", "body", "li"};
    switch (rng.below(16)) {
    case 0:
    case 1:
    case 2: return text_run(rng);
    case 3:
    case 4:
    case 5: {
        const auto& name = rng.pick(elements);
        return start_tag(rng, name) + text_run(rng) + "</" + rng.mixed_case(name) + ">";
    }
    case 6: {
        std::string body = std::string(rng.pick({"var a = 1 < 2;", "document.write('<scr'+'ipt>')",
                                                 "if (a</b) {}", "<!-- x -->", "s = '</scrip' + 't>';",
                                                 "</script x", ""}));
        return start_tag(rng, "script") + body + "</" + rng.mixed_case("script") + std::string(rng.pick({">", " >", "\n>"}));
    }
    case 7:
        return start_tag(rng, "style") + std::string(rng.pick({"a{color:red}", "/*<script>*/", "b:after{content:'<SCRIPT>'}"})) +
               "</style>";
    case 8:
        return start_tag(rng, rng.pick({"textarea", "title"})) +
               std::string(rng.pick({"<script>x</script>", "<a onclick=x>", "plain", "</b>"})) + "</" +
               std::string(rng.pick({"textarea", "title"})) + ">";
    case 9:
        return std::string(rng.pick({"<!-- c -->", "<!--<script>alert(1)</script>-->", "<!-->", "<!--->",
                                     "<!-- a --!>", "<!x onclick=y>", "<?php echo 1 ?>", "<!DOCTYPE html>",
                                     "<![CDATA[<script>]]>", "<!-- <a onclick=1> -->"}));
    case 10:
        return std::string(rng.pick({"</a onclick=x>", "</>", "</ x>", "</3>", "</div title='>'>"}));
    case 11:
        return std::string(rng.pick({"<", "<<img src=x>script>", "<<script></script>script>", "<<!-- x -->a onclick=1>",
                                     "<img src=a onerror=b>", "<scriptx>", "<script\x01>", "<a/onclick=x>",
                                     "<a\nonclick=x>", "<a =x onclick=y>"}));
    case 12: {
        std::string out;
        for (std::size_t i = rng.between(1, 8); i > 0; --i) {
            out += static_cast<char>(rng.below(256));
        }
        return out;
    }
    case 13: return "<a " + std::string(rng.pick({"href", "HREF"})) + "=" + quoted(rng, js_url(rng)) + " target=_blank>x</a>";
    case 14: return "<div" + attribute(rng) + attribute(rng) + ">";
    default: return std::string(rng.pick({"\n", "  ", "<br>", "<hr/>", "<p>"}));
    }
}

}  // namespace

std::string html_document(Rng& rng, std::size_t target_bytes) {
    std::string doc;
    if (rng.chance(0.5)) {
        doc += "<!DOCTYPE html><html><head><title>t</title></head><body>";
    }
    while (doc.size() < target_bytes) {
        doc += fragment(rng);
    }
    if (rng.chance(0.3)) {
        doc += rng.pick({"<a href='never closed", "<!-- unterminated", "<script>unclosed", "<", "</", "<div  on",
                         "<textarea>open", "<a b=\"c\""});
    }
    return doc;
}

namespace {

const std::string kTokenChars = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789!#$%&'*+-.^_`|~";

std::string token(Rng& rng, std::size_t lo, std::size_t hi) {
    std::string out;
    for (auto n = rng.between(lo, hi); n > 0; --n) {
        out += kTokenChars[rng.below(kTokenChars.size())];
    }
    return out;
}

std::string cookie_value(Rng& rng) {
    static const std::string chars = "abcXYZ019-_.~=%/:+\"!#$&'()*";
    std::string out;
    for (auto n = rng.below(24); n > 0; --n) {
        out += chars[rng.below(chars.size())];
    }
    if (rng.chance(0.1)) {
        out = " " + out;
    }
    if (rng.chance(0.1)) {
        out = "\"" + out + "\"";
    }
    return out;
}

std::string expires_date(Rng& rng) {
    return std::string(rng.pick({"Wed, 21 Oct 2026 07:28:00 GMT", "Thu, 01 Jan 1970 00:00:00 GMT", "Sun, 06-Nov-1994 08:49:37 GMT",
                                 "garbage", "", "Fri, 31 Dec 9999 23:59:59 GMT"}));
}

}  // namespace

GeneratedCookie set_cookie(Rng& rng) {
    GeneratedCookie c;
    std::string name = token(rng, 1, 12);
    switch (rng.below(20)) {
    case 0: name.clear(); c.well_formed = false; break;
    case 1: name = "bad name"; c.well_formed = false; break;
    case 2: name += "\x01"; c.well_formed = false; break;
    default: break;
    }
    bool no_equals = rng.below(25) == 0;
    if (no_equals) {
        c.well_formed = false;
        c.header = name;
    } else {
        c.header = (rng.chance(0.1) ? " " : "") + name + (rng.chance(0.1) ? " = " : "=") + cookie_value(rng);
    }
    for (auto n = rng.below(7); n > 0; --n) {
        std::string attr;
        switch (rng.below(9)) {
        case 0: attr = rng.mixed_case("Expires") + "=" + expires_date(rng); c.persistent = true; break;
        case 1: attr = rng.mixed_case("Max-Age") + "=" + std::to_string(static_cast<long>(rng.below(100000)) - 10); c.persistent = true; break;
        case 2: attr = rng.mixed_case("Max-Age"); c.persistent = true; break;
        case 3: attr = rng.mixed_case("Path") + "=/" + token(rng, 0, 6); break;
        case 4: attr = rng.mixed_case("Domain") + "=." + token(rng, 1, 8) + ".test"; break;
        case 5: attr = rng.mixed_case(std::string(rng.pick({"Secure", "HttpOnly", "Partitioned"}))); break;
        case 6: attr = rng.mixed_case("SameSite") + "=" + std::string(rng.pick({"Lax", "Strict", "None"})); break;
        case 7: attr = ""; break;
        default: attr = token(rng, 1, 8) + (rng.chance(0.5) ? "=" + token(rng, 0, 8) : ""); break;
        }
        c.header += std::string(rng.pick({"; ", ";", " ; ", ";  "})) + attr;
    }
    return c;
}

namespace {

const std::vector<std::string> kHosts = {
    "example.com", "a.example.com", "b.a.example.com", "www.example.com", "shop.test",
    "x.shop.test", "deep.x.shop.test", "other.org", "example.org", "com",
};

}  // namespace

std::string policy_name(Rng& rng, std::string_view field) {
    if (field == "cookies") {
        return std::string(rng.pick({"allow", "session-only", "block"}));
    }
    if (field == "notifications") {
        return std::string(rng.pick({"allow", "block", "ask"}));
    }
    return std::string(rng.pick({"allow", "block"}));
}

std::vector<oracle::PlainRule> rule_set(Rng& rng, std::size_t max_rules) {
    std::vector<oracle::PlainRule> rules;
    std::set<std::string> seen;
    auto n = rng.below(max_rules + 1);
    while (rules.size() < n) {
        std::string pattern;
        switch (rng.below(3)) {
        case 0: pattern = rng.pick(kHosts); break;
        case 1: pattern = "*." + rng.pick(kHosts); break;
        default: pattern = rng.chance(0.5) ? "*" : rng.pick(kHosts); break;
        }
        if (!seen.insert(pattern).second) {
            if (seen.size() >= kHosts.size() * 2 + 1) {
                break;
            }
            continue;
        }
        oracle::PlainRule rule{pattern, {}};
        for (auto field : oracle::kFieldNames) {
            if (rng.chance(0.5)) {
                rule.fields[std::string(field)] = policy_name(rng, field);
            }
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::string url(Rng& rng) {
    std::string host = rng.pick(kHosts);
    if (rng.chance(0.2)) {
        host = std::string(rng.pick({"zz.", "q.", "www."})) + host;
    }
    host = rng.mixed_case(host);
    if (rng.chance(0.1)) {
        host += ".";
    }
    std::string out = std::string(rng.pick({"http://", "https://", "HTTP://"}));
    if (rng.chance(0.05)) {
        out += "user:pw@";
    }
    out += host;
    if (rng.chance(0.2)) {
        out += ":" + std::to_string(rng.between(1, 65535));
    }
    out += std::string(rng.pick({"/", "/a/b.html", "/x.png?y=1", "", "?q", "#frag"}));
    return out;
}

}  // namespace gen
