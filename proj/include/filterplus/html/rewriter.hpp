#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "filterplus/html/token.hpp"
#include "filterplus/html/tokenizer.hpp"

namespace filterplus::html {

struct RewritePolicy {
    bool strip_scripts = false;
    bool strip_images = false;
    bool strip_popup_targets = false;

    bool any() const { return strip_scripts || strip_images || strip_popup_targets; }
    bool operator==(const RewritePolicy&) const = default;
};

// Classes of content a rewriter removed or neutralized in one document.
enum class Removal : std::uint8_t {
    script_elements,
    event_handlers,
    javascript_urls,
    script_markup,  // "<script" inside comments, text or attribute values
    image_elements,
    popup_targets,
};

class Removals {
public:
    void add(Removal r) { bits_ |= mask(r); }
    bool has(Removal r) const { return (bits_ & mask(r)) != 0; }
    bool empty() const { return bits_ == 0; }

private:
    static std::uint8_t mask(Removal r) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r)); }
    std::uint8_t bits_ = 0;
};

const char* to_string(Removal r);

// True when the value's scheme is javascript: after decoding character
// references and dropping ASCII whitespace and control characters.
bool is_javascript_url(std::string_view attribute_value);

// Applies a RewritePolicy to a token stream. Tokens it does not touch are
// serialized byte-identically.
class Rewriter {
public:
    explicit Rewriter(RewritePolicy policy) : policy_(policy) {}

    void write(const Token& token, std::string& out);
    // Emits text withheld at the end of the last Text token.
    void finish(std::string& out);
    // Accounts for a tag the end of input cut off, which is not written.
    void drop_unterminated() { dropped(); }
    const RewritePolicy& policy() const { return policy_; }
    const Removals& removals() const { return removals_; }

private:
    void write_start_tag(const Token& token, std::string& out);
    void write_text(std::string_view data, std::string& out);
    void flush_held(std::string& out);
    void dropped();

    RewritePolicy policy_;
    Removals removals_;
    bool skipping_script_ = false;
    std::string raw_element_;
    std::string held_;
    bool dropped_since_held_ = false;
};

// Tokenizer + Rewriter over a byte stream. Input starting with a UTF-16 byte
// order mark, or declared non-ASCII-compatible, passes through untouched.
class StreamRewriter {
public:
    explicit StreamRewriter(RewritePolicy policy, bool ascii_compatible = true);

    void feed(std::string_view chunk, std::string& out);
    void finish(std::string& out);

    const Removals& removals() const { return rewriter_.removals(); }
    bool passed_through() const { return mode_ == Mode::passthrough; }
    const Tokenizer& tokenizer() const { return tokenizer_; }

private:
    enum class Mode { sniffing, rewriting, passthrough };

    void run(std::string_view chunk, std::string& out);

    Mode mode_;
    std::string sniff_;
    Tokenizer tokenizer_;
    Rewriter rewriter_;
    std::vector<Token> tokens_;
};

}  // namespace filterplus::html
