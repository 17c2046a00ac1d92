#pragma once

#include <optional>
#include <string>
#include <vector>

namespace filterplus::html {

enum class TokenKind { start_tag, end_tag, text, comment, doctype, raw_text };

struct Attribute {
    std::string name;                   // ASCII-lowercased
    std::optional<std::string> value;   // undecoded, without quotes
    char quote = 0;                     // '"', '\'' or 0
    std::string source;                 // exact bytes, leading whitespace included
    std::size_t value_offset = 0;       // where the value starts within source

    bool operator==(const Attribute&) const = default;
};

// A tag serializes as head + attribute sources + tail; every other kind as data.
struct Token {
    TokenKind kind = TokenKind::text;
    std::string name;                   // tags only, ASCII-lowercased
    std::vector<Attribute> attributes;
    bool self_closing = false;
    std::string head;                   // "<name" / "</name" as written
    std::string tail;                   // bytes after the last attribute, through '>'
    std::string data;

    std::string source() const;
    void append_source(std::string& out) const;

    bool operator==(const Token&) const = default;
};

const char* to_string(TokenKind kind);

}  // namespace filterplus::html
