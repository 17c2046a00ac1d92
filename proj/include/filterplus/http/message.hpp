#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "filterplus/http/headers.hpp"

namespace filterplus::http {

class HttpParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RequestHead {
    std::string method;
    std::string target;
    std::string version = "HTTP/1.1";
    HeaderList headers;
};

struct ResponseHead {
    std::string version = "HTTP/1.1";
    int status = 200;
    std::string reason = "OK";
    HeaderList headers;
};

// Both parsers take the head including its terminating blank line (CRLF or
// bare LF line endings). Obsolete line folding is rejected.
RequestHead parse_request_head(std::string_view text);
ResponseHead parse_response_head(std::string_view text);

std::string serialize(const RequestHead& head);
std::string serialize(const ResponseHead& head);

std::string_view default_reason(int status);

// Offset one past the blank line ending a message head, or npos.
std::size_t find_head_end(std::string_view buffer);

enum class BodyFraming { none, content_length, chunked, until_close };

struct Framing {
    BodyFraming kind = BodyFraming::none;
    std::uint64_t length = 0;
};

Framing request_framing(const RequestHead& head);
Framing response_framing(std::string_view request_method, const ResponseHead& head);

// Incremental decoder for Transfer-Encoding: chunked. Trailers are discarded.
class ChunkedDecoder {
public:
    // Appends decoded payload to `out`; returns bytes of `in` consumed. Input
    // after the final chunk is left unconsumed. Throws HttpParseError.
    std::size_t feed(std::string_view in, std::string& out);
    bool done() const { return state_ == State::done; }

private:
    enum class State { size_line, data, data_crlf, trailer_line, done };
    State state_ = State::size_line;
    std::string line_;
    std::uint64_t remaining_ = 0;
};

void append_chunk(std::string& out, std::string_view data);
inline constexpr std::string_view kLastChunk = "0\r\n\r\n";

}  // namespace filterplus::http
