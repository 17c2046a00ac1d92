#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "filterplus/html/token.hpp"

namespace filterplus::html {

// Streaming tokenizer over an octet stream. Input may be split at any byte
// boundary; the emitted token sequence depends only on the concatenated
// input. script, style, textarea and title content is raw text up to the
// matching end tag. Markup left unfinished at end of input becomes Text.
class Tokenizer {
public:
    // Longest Text token emitted in one piece; longer runs are split at fixed
    // offsets from the start of the run.
    static constexpr std::size_t kMaxTextRun = 64 * 1024;

    void feed(std::string_view chunk, std::vector<Token>& out);
    // True when the last token emitted is an unterminated tag, as Text.
    bool finish(std::vector<Token>& out);

    // Bytes held for the token currently being assembled.
    std::size_t buffered() const;
    // Largest value of buffered() observed between feed calls.
    std::size_t high_water() const { return high_water_; }

private:
    enum class State {
        data,
        tag_open,
        end_tag_open,
        markup_declaration,
        comment,
        doctype,
        bogus_comment,
        tag_name,
        before_attribute_name,
        attribute_name,
        after_attribute_name,
        before_attribute_value,
        attribute_value_double,
        attribute_value_single,
        attribute_value_unquoted,
        after_attribute_value_quoted,
        self_closing_start,
        raw_text,
        raw_less_than,
        raw_end_tag_open,
        raw_end_tag_name,
    };

    bool consume(char c, std::vector<Token>& out);
    std::size_t bulk(std::string_view rest, std::vector<Token>& out);

    void flush_text(std::vector<Token>& out);
    void append_text(std::string_view bytes, std::vector<Token>& out);
    void emit_pending(TokenKind kind, std::vector<Token>& out);
    void begin_tag(bool end_tag, std::string head, std::string name);
    void begin_attribute(char c);
    void finish_attribute_at(std::size_t end);
    void emit_tag(std::vector<Token>& out);
    void emit_raw(std::vector<Token>& out);

    State state_ = State::data;
    std::string text_;
    std::string pending_;
    Token tag_;
    std::string seg_;
    Attribute attr_;
    std::size_t attr_end_ = 0;
    std::string raw_;
    std::string candidate_;
    std::string raw_end_name_;
    std::size_t high_water_ = 0;
};

}  // namespace filterplus::html
