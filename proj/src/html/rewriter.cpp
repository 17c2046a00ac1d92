#include "filterplus/html/rewriter.hpp"

#include <charconv>

namespace filterplus::html {

namespace {

char lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\r';
}

bool is_image_element(std::string_view name) {
    return name == "img" || name == "image" || name == "picture" || name == "source";
}

bool is_url_attribute(std::string_view name) {
    return name == "href" || name == "src" || name == "action" || name == "formaction";
}

std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0) {
    if (needle.size() > haystack.size()) {
        return std::string_view::npos;
    }
    for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < needle.size() && hit; ++j) {
            hit = lower(haystack[i + j]) == needle[j];
        }
        if (hit) {
            return i;
        }
    }
    return std::string_view::npos;
}

// Rewrites every "<script" (any case) so no script start tag can be formed;
// `lt` replaces the '<'.
bool neutralize_script_markup(std::string& s, std::string_view lt) {
    bool changed = false;
    for (auto pos = ifind(s, "<script"); pos != std::string::npos; pos = ifind(s, "<script", pos + lt.size())) {
        s.replace(pos, 1, lt);
        changed = true;
    }
    return changed;
}

std::string trimmed_lower(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    std::string out(s);
    for (char& c : out) c = lower(c);
    return out;
}

// Decodes numeric references and the few named ones that matter for scheme
// detection; everything else is copied.
std::string decode_references(std::string_view v) {
    std::string out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != '&') {
            out += v[i];
            continue;
        }
        auto rest = v.substr(i + 1);
        if (!rest.empty() && rest.front() == '#') {
            bool hex = rest.size() > 1 && (rest[1] == 'x' || rest[1] == 'X');
            auto digits = rest.substr(hex ? 2 : 1);
            unsigned code = 0;
            auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), code, hex ? 16 : 10);
            auto used = static_cast<std::size_t>(end - digits.data());
            if (ec == std::errc() && used > 0) {
                out += code < 0x80 ? static_cast<char>(code) : '?';
                i += (hex ? 2 : 1) + used;
                if (i + 1 < v.size() && v[i + 1] == ';') {
                    ++i;
                }
                continue;
            }
        }
        static constexpr std::pair<std::string_view, char> kNamed[] = {
            {"colon;", ':'}, {"tab;", '\t'}, {"newline;", '\n'},
        };
        bool matched = false;
        for (auto [name, ch] : kNamed) {
            if (rest.size() >= name.size() && trimmed_lower(rest.substr(0, name.size())) == name) {
                out += ch;
                i += name.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            out += '&';
        }
    }
    return out;
}

}  // namespace

const char* to_string(Removal r) {
    switch (r) {
    case Removal::script_elements: return "script elements";
    case Removal::event_handlers: return "event-handler attributes";
    case Removal::javascript_urls: return "javascript: URLs";
    case Removal::script_markup: return "script markup in inert content";
    case Removal::image_elements: return "image elements";
    case Removal::popup_targets: return "popup targets";
    }
    return "?";
}

bool is_javascript_url(std::string_view attribute_value) {
    std::string compact;
    for (char c : decode_references(attribute_value)) {
        auto uc = static_cast<unsigned char>(c);
        if (uc > 0x20 && uc != 0x7f) {
            compact += lower(c);
        }
        if (compact.size() >= 11) {
            break;
        }
    }
    return compact.starts_with("javascript:");
}

void Rewriter::write(const Token& token, std::string& out) {
    if (skipping_script_) {
        if (token.kind == TokenKind::raw_text) {
            return;
        }
        skipping_script_ = false;
        if (token.kind == TokenKind::end_tag && token.name == "script") {
            return;
        }
    }
    switch (token.kind) {
    case TokenKind::start_tag:
        if (policy_.strip_scripts && token.name == "script") {
            removals_.add(Removal::script_elements);
            skipping_script_ = true;
            dropped();
            return;
        }
        // A lenient parse can leave "<script" inside a tag name such as "a<script".
        if (policy_.strip_scripts && ifind(token.name, "<script") != std::string_view::npos) {
            removals_.add(Removal::script_markup);
            dropped();
            return;
        }
        if (policy_.strip_images && is_image_element(token.name)) {
            removals_.add(Removal::image_elements);
            dropped();
            return;
        }
        flush_held(out);
        raw_element_ = token.name;
        write_start_tag(token, out);
        return;
    case TokenKind::end_tag:
        if ((policy_.strip_scripts && token.name == "script") ||
            (policy_.strip_images && is_image_element(token.name))) {
            dropped();
            return;
        }
        if (policy_.strip_scripts && ifind(token.source(), "<script") != std::string_view::npos) {
            removals_.add(Removal::script_markup);
            if (ifind(token.name, "<script") != std::string_view::npos) {
                dropped();
                return;
            }
            flush_held(out);
            out += "</" + token.name + ">";
            return;
        }
        flush_held(out);
        token.append_source(out);
        return;
    case TokenKind::text:
        if (policy_.any()) {
            write_text(token.data, out);
            return;
        }
        out += token.data;
        return;
    case TokenKind::raw_text:
        flush_held(out);
        if (policy_.strip_scripts && ifind(token.data, "<script") != std::string_view::npos) {
            std::string data = token.data;
            neutralize_script_markup(data, raw_element_ == "style" ? "\\3c " : "&lt;");
            removals_.add(Removal::script_markup);
            out += data;
            return;
        }
        out += token.data;
        return;
    case TokenKind::comment:
    case TokenKind::doctype:
        if (policy_.strip_scripts && ifind(token.data, "<script") != std::string_view::npos) {
            removals_.add(Removal::script_markup);
            dropped();
            return;
        }
        flush_held(out);
        out += token.data;
        return;
    }
}

void Rewriter::finish(std::string& out) {
    flush_held(out);
}

// Text is emitted minus any trailing proper prefix of "<script". Once
// something is dropped after that prefix, joining it to whatever comes next
// could form markup the input never had, so its '<' is escaped.
void Rewriter::write_text(std::string_view data, std::string& out) {
    std::string text;
    if (!held_.empty()) {
        if (dropped_since_held_) {
            held_.replace(0, 1, "&lt;");
        }
        text = std::move(held_);
        held_.clear();
    }
    text.append(data);
    dropped_since_held_ = false;
    if (policy_.strip_scripts && neutralize_script_markup(text, "&lt;")) {
        removals_.add(Removal::script_markup);
    }
    constexpr std::string_view kScript = "<script";
    auto keep = std::min(text.size(), kScript.size() - 1);
    for (; keep > 0; --keep) {
        auto tail = std::string_view(text).substr(text.size() - keep);
        bool prefix = true;
        for (std::size_t i = 0; i < keep && prefix; ++i) {
            prefix = lower(tail[i]) == kScript[i];
        }
        if (prefix) {
            break;
        }
    }
    auto split = text.size() - keep;
    out.append(text, 0, split);
    held_ = text.substr(split);
}

void Rewriter::flush_held(std::string& out) {
    if (held_.empty()) {
        return;
    }
    if (dropped_since_held_) {
        held_.replace(0, 1, "&lt;");
    }
    out += held_;
    held_.clear();
    dropped_since_held_ = false;
}

void Rewriter::dropped() {
    dropped_since_held_ = !held_.empty();
}

void Rewriter::write_start_tag(const Token& token, std::string& out) {
    if (!policy_.any()) {
        token.append_source(out);
        return;
    }
    std::string tag = token.head;
    std::size_t last_written = 0;  // index + 1 of the last attribute kept; 0 = head
    bool open_value = false;       // last kept attribute ends in an unquoted value
    bool bare_name = false;        // last kept attribute has no value
    bool changed = false;
    for (std::size_t i = 0; i < token.attributes.size(); ++i) {
        const auto& attr = token.attributes[i];
        if (policy_.strip_scripts && ifind(attr.name, "<script") != std::string_view::npos) {
            removals_.add(Removal::script_markup);
            changed = true;
            continue;
        }
        // After a valueless attribute, a name starting with '=' would read as its value.
        if (bare_name && attr.name.starts_with('=') && last_written != i) {
            changed = true;
            continue;
        }
        if (policy_.strip_scripts && attr.name.starts_with("on")) {
            removals_.add(Removal::event_handlers);
            changed = true;
            continue;
        }
        if (policy_.strip_popup_targets && attr.name == "target" && attr.value) {
            auto v = trimmed_lower(*attr.value);
            if (v == "_blank" || v == "_new") {
                removals_.add(Removal::popup_targets);
                changed = true;
                continue;
            }
        }
        std::string source = attr.source;
        if (policy_.strip_scripts && attr.value) {
            std::string value = *attr.value;
            bool edited = false;
            if (is_url_attribute(attr.name) && is_javascript_url(value)) {
                value = attr.quote ? "" : "\"\"";
                removals_.add(Removal::javascript_urls);
                edited = true;
            } else if (neutralize_script_markup(value, "&lt;")) {
                if (!attr.quote) {
                    std::string quoted = "\"";
                    for (char c : value) {
                        quoted += c == '"' ? std::string_view("&quot;") : std::string_view(&c, 1);
                    }
                    value = quoted + "\"";
                }
                removals_.add(Removal::script_markup);
                edited = true;
            }
            if (edited) {
                source = attr.source.substr(0, attr.value_offset) + value +
                         attr.source.substr(attr.value_offset + attr.value->size());
                changed = true;
            }
        }
        // An attribute that followed a removed one directly after a quote
        // needs a separator of its own.
        // An unquoted value would swallow a following '/'.
        if (!source.empty() && !is_space(source.front()) && last_written != i &&
            (source.front() != '/' || open_value)) {
            tag += ' ';
        }
        tag += source;
        open_value = attr.value && !attr.quote && source == attr.source;
        bare_name = !attr.value;
        last_written = i + 1;
    }
    if (!changed) {
        token.append_source(out);
        return;
    }
    if (open_value && last_written != token.attributes.size() && token.tail.front() == '/') {
        tag += ' ';
    }
    tag += token.tail;
    out += tag;
}

StreamRewriter::StreamRewriter(RewritePolicy policy, bool ascii_compatible)
    : mode_(ascii_compatible ? Mode::sniffing : Mode::passthrough), rewriter_(policy) {}

void StreamRewriter::feed(std::string_view chunk, std::string& out) {
    if (mode_ == Mode::passthrough) {
        out.append(chunk);
        return;
    }
    if (mode_ == Mode::sniffing) {
        sniff_.append(chunk);
        if (sniff_.size() < 2) {
            return;
        }
        bool utf16 = (sniff_[0] == '\xFF' && sniff_[1] == '\xFE') || (sniff_[0] == '\xFE' && sniff_[1] == '\xFF');
        mode_ = utf16 ? Mode::passthrough : Mode::rewriting;
        std::string buffered = std::move(sniff_);
        sniff_.clear();
        feed(buffered, out);
        return;
    }
    run(chunk, out);
}

void StreamRewriter::finish(std::string& out) {
    if (mode_ == Mode::sniffing) {
        mode_ = Mode::rewriting;
        std::string buffered = std::move(sniff_);
        sniff_.clear();
        run(buffered, out);
    }
    if (mode_ == Mode::passthrough) {
        return;
    }
    tokens_.clear();
    bool unterminated = tokenizer_.finish(tokens_);
    // A tag cut off by the end of input is discarded, as a browser does.
    bool discard = unterminated && rewriter_.policy().any();
    if (discard) {
        tokens_.pop_back();
    }
    for (const auto& t : tokens_) {
        rewriter_.write(t, out);
    }
    if (discard) {
        rewriter_.drop_unterminated();
    }
    tokens_.clear();
    rewriter_.finish(out);
}

void StreamRewriter::run(std::string_view chunk, std::string& out) {
    tokens_.clear();
    tokenizer_.feed(chunk, tokens_);
    for (const auto& t : tokens_) {
        rewriter_.write(t, out);
    }
    tokens_.clear();
}

}  // namespace filterplus::html
