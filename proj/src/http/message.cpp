#include "filterplus/http/message.hpp"

#include <charconv>
#include <vector>

namespace filterplus::http {

namespace {

bool is_tchar(char c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
        return true;
    }
    return std::string_view("!#$%&'*+-.^_`|~").find(c) != std::string_view::npos;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            break;
        }
        lines.push_back(line);
        if (nl == std::string_view::npos) {
            break;
        }
        text.remove_prefix(nl + 1);
    }
    return lines;
}

HeaderList parse_header_lines(const std::vector<std::string_view>& lines) {
    HeaderList headers;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto line = lines[i];
        if (line.front() == ' ' || line.front() == '\t') {
            throw HttpParseError("obsolete header line folding");
        }
        auto colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0) {
            throw HttpParseError("malformed header line");
        }
        auto name = line.substr(0, colon);
        for (char c : name) {
            if (!is_tchar(c)) {
                throw HttpParseError("invalid header name '" + std::string(name) + "'");
            }
        }
        headers.push_back({std::string(name), std::string(trim(line.substr(colon + 1)))});
    }
    return headers;
}

bool valid_version(std::string_view v) {
    return v.size() == 8 && v.substr(0, 5) == "HTTP/" && v[5] >= '0' && v[5] <= '9' && v[6] == '.' &&
           v[7] >= '0' && v[7] <= '9';
}

std::uint64_t parse_content_length(const HeaderList& headers) {
    std::optional<std::uint64_t> result;
    for (const auto& h : headers) {
        if (!iequals(h.name, "content-length")) {
            continue;
        }
        std::uint64_t value = 0;
        auto v = trim(h.value);
        auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
        if (v.empty() || ec != std::errc() || end != v.data() + v.size()) {
            throw HttpParseError("invalid Content-Length");
        }
        if (result && *result != value) {
            throw HttpParseError("conflicting Content-Length headers");
        }
        result = value;
    }
    return result.value_or(0);
}

bool is_chunked(const HeaderList& headers) {
    auto codings = header_tokens(headers, "transfer-encoding");
    if (codings.empty()) {
        return false;
    }
    if (codings.back() != "chunked") {
        throw HttpParseError("unsupported transfer coding");
    }
    return true;
}

}  // namespace

RequestHead parse_request_head(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) {
        throw HttpParseError("empty request");
    }
    RequestHead head;
    auto line = lines.front();
    auto sp1 = line.find(' ');
    auto sp2 = line.rfind(' ');
    if (sp1 == std::string_view::npos || sp1 == sp2 || sp1 == 0) {
        throw HttpParseError("malformed request line");
    }
    head.method = std::string(line.substr(0, sp1));
    head.target = std::string(line.substr(sp1 + 1, sp2 - sp1 - 1));
    head.version = std::string(line.substr(sp2 + 1));
    for (char c : head.method) {
        if (!is_tchar(c)) {
            throw HttpParseError("invalid method");
        }
    }
    if (head.target.empty() || head.target.find(' ') != std::string::npos) {
        throw HttpParseError("invalid request target");
    }
    if (!valid_version(head.version)) {
        throw HttpParseError("invalid HTTP version");
    }
    head.headers = parse_header_lines(lines);
    return head;
}

ResponseHead parse_response_head(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) {
        throw HttpParseError("empty response");
    }
    ResponseHead head;
    auto line = lines.front();
    auto sp1 = line.find(' ');
    if (sp1 == std::string_view::npos) {
        throw HttpParseError("malformed status line");
    }
    head.version = std::string(line.substr(0, sp1));
    if (!valid_version(head.version)) {
        throw HttpParseError("invalid HTTP version");
    }
    auto rest = line.substr(sp1 + 1);
    auto sp2 = rest.find(' ');
    auto code = rest.substr(0, sp2);
    int status = 0;
    auto [end, ec] = std::from_chars(code.data(), code.data() + code.size(), status);
    if (code.size() != 3 || ec != std::errc() || end != code.data() + code.size() || status < 100) {
        throw HttpParseError("invalid status code");
    }
    head.status = status;
    head.reason = sp2 == std::string_view::npos ? std::string() : std::string(rest.substr(sp2 + 1));
    head.headers = parse_header_lines(lines);
    return head;
}

std::string serialize(const RequestHead& head) {
    std::string out = head.method + " " + head.target + " " + head.version + "\r\n";
    for (const auto& h : head.headers) {
        out += h.name + ": " + h.value + "\r\n";
    }
    out += "\r\n";
    return out;
}

std::string serialize(const ResponseHead& head) {
    std::string out = head.version + " " + std::to_string(head.status) + " " + head.reason + "\r\n";
    for (const auto& h : head.headers) {
        out += h.name + ": " + h.value + "\r\n";
    }
    out += "\r\n";
    return out;
}

std::string_view default_reason(int status) {
    switch (status) {
    case 200: return "OK";
    case 204: return "No Content";
    case 400: return "Bad Request";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 502: return "Bad Gateway";
    case 504: return "Gateway Timeout";
    default: return "Unknown";
    }
}

std::size_t find_head_end(std::string_view buffer) {
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        if (buffer[i] != '\n') {
            continue;
        }
        if (i + 1 < buffer.size() && buffer[i + 1] == '\n') {
            return i + 2;
        }
        if (i + 2 < buffer.size() && buffer[i + 1] == '\r' && buffer[i + 2] == '\n') {
            return i + 3;
        }
    }
    return std::string_view::npos;
}

Framing request_framing(const RequestHead& head) {
    if (is_chunked(head.headers)) {
        return {BodyFraming::chunked, 0};
    }
    auto length = parse_content_length(head.headers);
    return length > 0 ? Framing{BodyFraming::content_length, length} : Framing{};
}

Framing response_framing(std::string_view request_method, const ResponseHead& head) {
    if (request_method == "HEAD" || (head.status >= 100 && head.status < 200) || head.status == 204 ||
        head.status == 304) {
        return {};
    }
    if (is_chunked(head.headers)) {
        return {BodyFraming::chunked, 0};
    }
    if (has_header(head.headers, "content-length")) {
        auto length = parse_content_length(head.headers);
        return length > 0 ? Framing{BodyFraming::content_length, length} : Framing{};
    }
    return {BodyFraming::until_close, 0};
}

std::size_t ChunkedDecoder::feed(std::string_view in, std::string& out) {
    std::size_t pos = 0;
    while (pos < in.size() && state_ != State::done) {
        switch (state_) {
        case State::size_line:
        case State::trailer_line: {
            auto nl = in.find('\n', pos);
            if (nl == std::string_view::npos) {
                line_.append(in.substr(pos));
                if (line_.size() > 4096) {
                    throw HttpParseError("chunk line too long");
                }
                return in.size();
            }
            line_.append(in.substr(pos, nl - pos));
            pos = nl + 1;
            if (!line_.empty() && line_.back() == '\r') {
                line_.pop_back();
            }
            if (state_ == State::trailer_line) {
                if (line_.empty()) {
                    state_ = State::done;
                }
                line_.clear();
                break;
            }
            auto size_text = trim(std::string_view(line_).substr(0, line_.find(';')));
            std::uint64_t size = 0;
            auto [end, ec] = std::from_chars(size_text.data(), size_text.data() + size_text.size(), size, 16);
            if (size_text.empty() || ec != std::errc() || end != size_text.data() + size_text.size()) {
                throw HttpParseError("invalid chunk size");
            }
            line_.clear();
            remaining_ = size;
            state_ = size == 0 ? State::trailer_line : State::data;
            break;
        }
        case State::data: {
            auto take = static_cast<std::size_t>(std::min<std::uint64_t>(remaining_, in.size() - pos));
            out.append(in.substr(pos, take));
            pos += take;
            remaining_ -= take;
            if (remaining_ == 0) {
                state_ = State::data_crlf;
            }
            break;
        }
        case State::data_crlf: {
            char c = in[pos++];
            if (c == '\n') {
                state_ = State::size_line;
            } else if (c != '\r') {
                throw HttpParseError("missing CRLF after chunk data");
            }
            break;
        }
        case State::done:
            break;
        }
    }
    return pos;
}

void append_chunk(std::string& out, std::string_view data) {
    if (data.empty()) {
        return;
    }
    char hex[20];
    auto [end, ec] = std::to_chars(hex, hex + sizeof hex, data.size(), 16);
    out.append(hex, end);
    out += "\r\n";
    out.append(data);
    out += "\r\n";
}

}  // namespace filterplus::http
