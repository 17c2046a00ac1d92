#include "filterplus/proxy/proxy_server.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <iostream>

#include "filterplus/http/message.hpp"
#include "filterplus/http/url.hpp"

namespace filterplus::proxy {

using events::Action;
using events::Category;

namespace {

constexpr std::size_t kIoChunk = 16 * 1024;

std::string error_response(int status, std::string_view message) {
    http::ResponseHead head;
    head.status = status;
    head.reason = std::string(http::default_reason(status));
    std::string body = std::string(message) + "\n";
    head.headers = {
        {"Content-Type", "text/plain; charset=utf-8"},
        {"Content-Length", std::to_string(body.size())},
        {"Cache-Control", "no-store"},
        {"Connection", "close"},
    };
    return http::serialize(head) + body;
}

bool wants_close(const http::RequestHead& head) {
    auto tokens = http::header_tokens(head.headers, "connection");
    auto has = [&](std::string_view t) { return std::find(tokens.begin(), tokens.end(), t) != tokens.end(); };
    if (head.version == "HTTP/1.0") {
        return !has("keep-alive");
    }
    return has("close");
}

// Copies a request body from client to origin according to its framing.
bool relay_request_body(Stream& client, Stream& origin, const http::Framing& framing) {
    std::string buf;
    if (framing.kind == http::BodyFraming::content_length) {
        auto remaining = framing.length;
        while (remaining > 0) {
            buf.clear();
            auto n = client.read_some(buf, static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kIoChunk)));
            if (n == 0 || !origin.write_all(buf)) {
                return false;
            }
            remaining -= n;
        }
        return true;
    }
    if (framing.kind == http::BodyFraming::chunked) {
        http::ChunkedDecoder decoder;
        while (!decoder.done()) {
            std::string raw;
            if (client.read_some(raw, kIoChunk) == 0) {
                return false;
            }
            std::string payload;
            auto used = decoder.feed(raw, payload);
            std::string framed;
            http::append_chunk(framed, payload);
            if (decoder.done()) {
                framed += http::kLastChunk;
            }
            if (!origin.write_all(framed)) {
                return false;
            }
            (void)used;
        }
        return true;
    }
    return true;
}

// Reads and discards a request body the proxy answered itself.
bool discard_request_body(Stream& client, const http::Framing& framing) {
    std::string sink;
    if (framing.kind == http::BodyFraming::content_length) {
        auto remaining = framing.length;
        while (remaining > 0) {
            sink.clear();
            auto n = client.read_some(sink, static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kIoChunk)));
            if (n == 0) {
                return false;
            }
            remaining -= n;
        }
    } else if (framing.kind == http::BodyFraming::chunked) {
        http::ChunkedDecoder decoder;
        while (!decoder.done()) {
            std::string raw;
            if (client.read_some(raw, kIoChunk) == 0) {
                return false;
            }
            sink.clear();
            decoder.feed(raw, sink);
        }
    }
    return true;
}

}  // namespace

// State for one client connection.
class ProxyServer::Connection {
public:
    Connection(ProxyServer& server, const Socket& client, std::string peer)
        : server_(server), client_socket_(client), client_(client), peer_(std::move(peer)) {}

    void run();

private:
    // Returns false when the connection must be closed.
    bool handle_one();
    bool handle_connect(const http::RequestHead& head);
    bool forward(const RequestContext& ctx, const ForwardRequest& fwd, const http::RequestHead& head);
    void record(const RequestContext& ctx, const std::vector<Verdict>& verdicts);
    void record(const std::string& url, const policy::Resolution& resolution, const Verdict& v);
    bool send_blocked(const RequestContext& ctx, const BlockedResponse& blocked, bool close);

    ProxyServer& server_;
    const Socket& client_socket_;
    Stream client_;
    std::string peer_;
};

void ProxyServer::Connection::run() {
    try {
        while (!server_.stopping_ && handle_one()) {
        }
    } catch (const SocketError&) {
        // Client went away or timed out.
    } catch (const http::HttpParseError& e) {
        client_.write_all(error_response(400, e.what()));
    }
}

bool ProxyServer::Connection::handle_one() {
    std::optional<std::string> raw;
    try {
        raw = client_.read_head(server_.options_.max_head_bytes);
    } catch (const SocketError& e) {
        if (std::string_view(e.what()) == "message head too large") {
            client_.write_all(error_response(400, "request head too large"));
        }
        return false;
    }
    if (!raw) {
        return false;
    }
    http::RequestHead head;
    try {
        head = http::parse_request_head(*raw);
    } catch (const http::HttpParseError& e) {
        client_.write_all(error_response(400, e.what()));
        return false;
    }
    if (head.method == "CONNECT") {
        return handle_connect(head);
    }

    http::Url url;
    try {
        url = http::parse_absolute_url(head.target);
    } catch (const http::UrlError& e) {
        // Origin-form requests ("/api/...") are never served here.
        client_.write_all(error_response(400, "absolute-form request target required"));
        return false;
    }
    if (url.scheme != "http") {
        client_.write_all(error_response(400, "only http:// targets are proxied; use CONNECT for https"));
        return false;
    }

    http::Framing request_body;
    try {
        request_body = http::request_framing(head);
    } catch (const http::HttpParseError& e) {
        client_.write_all(error_response(400, e.what()));
        return false;
    }

    auto rules = server_.store_.snapshot();
    auto ctx = make_context(head, url, peer_, *rules, server_.baseline_);
    auto decision = filter_request(ctx);
    record(ctx, decision.verdicts);

    bool close = wants_close(head);
    if (auto* blocked = std::get_if<BlockedResponse>(&decision.outcome)) {
        if (!discard_request_body(client_, request_body)) {
            return false;
        }
        return send_blocked(ctx, *blocked, close) && !close;
    }
    if (http::iequals(http::find_header(head.headers, "expect").value_or(""), "100-continue")) {
        client_.write_all("HTTP/1.1 100 Continue\r\n\r\n");
    }
    return forward(ctx, std::get<ForwardRequest>(decision.outcome), head) && !close;
}

bool ProxyServer::Connection::send_blocked(const RequestContext& ctx, const BlockedResponse& blocked, bool close) {
    auto out = blocked_head(blocked);
    if (close) {
        out.headers.push_back({"Connection", "close"});
    }
    (void)ctx;
    return client_.write_all(http::serialize(out));
}

bool ProxyServer::Connection::forward(const RequestContext& ctx, const ForwardRequest& fwd,
                                      const http::RequestHead& head) {
    Socket origin_socket;
    try {
        origin_socket = connect_tcp(ctx.url.host, ctx.url.port, server_.options_.connect_timeout);
    } catch (const SocketError& e) {
        record(ctx, {{Category::upstream, Action::blocked, e.what()}});
        client_.write_all(http::serialize(blocked_head({502, Category::upstream})));
        return false;
    }
    origin_socket.set_timeouts(server_.options_.io_timeout);
    Stream origin(origin_socket);

    auto upstream_failure = [&](std::string_view what) {
        record(ctx, {{Category::upstream, Action::blocked, std::string(what)}});
        client_.write_all(http::serialize(blocked_head({502, Category::upstream})));
        return false;
    };

    if (!origin.write_all(http::serialize(fwd.head)) || !relay_request_body(client_, origin, http::request_framing(head))) {
        return upstream_failure("failed to send request to origin");
    }

    http::ResponseHead response;
    http::Framing framing;
    try {
        for (;;) {
            auto raw = origin.read_head(server_.options_.max_head_bytes);
            if (!raw) {
                return upstream_failure("origin closed without a response");
            }
            response = http::parse_response_head(*raw);
            if (response.status >= 200 || response.status == 101) {
                break;
            }
        }
        framing = http::response_framing(ctx.method, response);
    } catch (const std::exception& e) {
        return upstream_failure(std::string("bad origin response: ") + e.what());
    }

    auto plan = filter_response(ctx, response);
    record(ctx, plan.verdicts);

    bool chunked_ok = head.version == "HTTP/1.1";
    bool has_body = framing.kind != http::BodyFraming::none;
    bool close_after = false;

    // Framing towards the client.
    enum class Out { none, identity_length, chunked, until_close } out_mode = Out::none;
    if (plan.body == BodyAction::drop) {
        out_mode = Out::none;
        if (!http::has_header(plan.head.headers, "content-length") && plan.head.status != 204 &&
            plan.head.status != 304) {
            plan.head.headers.push_back({"Content-Length", "0"});
        }
    } else if (!has_body) {
        out_mode = Out::none;
    } else if (plan.body == BodyAction::pass && framing.kind == http::BodyFraming::content_length) {
        out_mode = Out::identity_length;
    } else if (chunked_ok) {
        out_mode = Out::chunked;
        http::remove_header(plan.head.headers, "content-length");
        plan.head.headers.push_back({"Transfer-Encoding", "chunked"});
    } else {
        out_mode = Out::until_close;
        http::remove_header(plan.head.headers, "content-length");
        close_after = true;
    }
    if (close_after || framing.kind == http::BodyFraming::until_close) {
        plan.head.headers.push_back({"Connection", "close"});
        close_after = true;
    }
    if (!client_.write_all(http::serialize(plan.head))) {
        return false;
    }
    if (plan.body == BodyAction::drop || !has_body) {
        return !close_after && framing.kind != http::BodyFraming::until_close;
    }

    std::optional<html::StreamRewriter> rewriter;
    if (plan.body == BodyAction::rewrite_html) {
        rewriter.emplace(plan.rewrite, plan.ascii_compatible);
    }

    auto emit = [&](std::string_view bytes) {
        if (bytes.empty()) {
            return true;
        }
        if (out_mode == Out::chunked) {
            std::string framed;
            http::append_chunk(framed, bytes);
            return client_.write_all(framed);
        }
        return client_.write_all(bytes);
    };

    auto process = [&](std::string_view payload) {
        if (!rewriter) {
            return emit(payload);
        }
        std::string rewritten;
        rewriter->feed(payload, rewritten);
        return emit(rewritten);
    };

    bool complete = false;
    try {
        std::string raw;
        if (framing.kind == http::BodyFraming::content_length) {
            auto remaining = framing.length;
            while (remaining > 0) {
                raw.clear();
                auto n = origin.read_some(raw, static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kIoChunk)));
                if (n == 0) {
                    break;
                }
                remaining -= n;
                if (!process(raw)) {
                    return false;
                }
            }
            complete = remaining == 0;
        } else if (framing.kind == http::BodyFraming::chunked) {
            http::ChunkedDecoder decoder;
            while (!decoder.done()) {
                raw.clear();
                if (origin.read_some(raw, kIoChunk) == 0) {
                    break;
                }
                std::string payload;
                decoder.feed(raw, payload);
                if (!process(payload)) {
                    return false;
                }
            }
            complete = decoder.done();
        } else {
            for (;;) {
                raw.clear();
                if (origin.read_some(raw, kIoChunk) == 0) {
                    break;
                }
                if (!process(raw)) {
                    return false;
                }
            }
            complete = true;
        }
    } catch (const std::exception&) {
        complete = false;
    }

    if (rewriter) {
        std::string tail;
        rewriter->finish(tail);
        if (!emit(tail)) {
            return false;
        }
        record(ctx, rewrite_verdicts(rewriter->removals()));
        if (rewriter->passed_through()) {
            std::cerr << "filterplus: warning: " << ctx.url.host << ctx.url.path
                      << " is not ASCII-compatible; HTML body passed through unmodified\n";
            record(ctx, {{Category::javascript, Action::bypassed, "non-ASCII-compatible HTML passed through"}});
        }
    }
    if (!complete) {
        // Truncated origin body: no terminating chunk, so the client sees the break.
        return false;
    }
    if (out_mode == Out::chunked && !client_.write_all(http::kLastChunk)) {
        return false;
    }
    return !close_after;
}

bool ProxyServer::Connection::handle_connect(const http::RequestHead& head) {
    http::HostPort target;
    try {
        target = http::parse_authority(head.target);
    } catch (const http::UrlError& e) {
        client_.write_all(error_response(400, e.what()));
        return false;
    }
    auto rules = server_.store_.snapshot();
    auto resolution = rules->resolve(target.host, server_.baseline_);
    auto url = head.target;
    if (resolution.policy.blocks_everything()) {
        record(url, resolution, {Category::tunnel, Action::blocked, "site blocked entirely"});
        client_.write_all(http::serialize(blocked_head({403, Category::tunnel})));
        return false;
    }
    Socket origin_socket;
    try {
        origin_socket = connect_tcp(target.host, target.port, server_.options_.connect_timeout);
    } catch (const SocketError& e) {
        record(url, resolution, {Category::upstream, Action::blocked, e.what()});
        client_.write_all(http::serialize(blocked_head({502, Category::upstream})));
        return false;
    }
    if (!client_.write_all("HTTP/1.1 200 Connection Established\r\n\r\n")) {
        return false;
    }
    record(url, resolution, {Category::tunnel, Action::bypassed, "opaque tunnel, content not filtered"});

    {
        std::lock_guard lock(server_.active_mutex_);
        server_.active_fds_.insert(origin_socket.fd());
    }
    Stream origin(origin_socket);
    bool ok = origin.write_all(client_.take_buffered());
    pollfd fds[2] = {{client_socket_.fd(), POLLIN, 0}, {origin_socket.fd(), POLLIN, 0}};
    char buf[kIoChunk];
    while (ok && !server_.stopping_) {
        int rc = ::poll(fds, 2, static_cast<int>(server_.options_.tunnel_idle_timeout.count()));
        if (rc <= 0) {
            break;
        }
        for (int i = 0; i < 2 && ok; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) {
                continue;
            }
            auto n = ::recv(fds[i].fd, buf, sizeof buf, 0);
            if (n <= 0) {
                ok = false;
                break;
            }
            Stream& to = i == 0 ? origin : client_;
            ok = to.write_all(std::string_view(buf, static_cast<std::size_t>(n)));
        }
    }
    {
        std::lock_guard lock(server_.active_mutex_);
        server_.active_fds_.erase(origin_socket.fd());
    }
    return false;
}

void ProxyServer::Connection::record(const RequestContext& ctx, const std::vector<Verdict>& verdicts) {
    for (const auto& v : verdicts) {
        record("http://" + ctx.url.authority() + ctx.url.path, ctx.resolution, v);
    }
}

void ProxyServer::Connection::record(const std::string& url, const policy::Resolution& resolution, const Verdict& v) {
    server_.log_.append(v.category, v.action, url, matched_pattern(resolution, v.category), v.detail);
}

ProxyServer::ProxyServer(const policy::RuleStore& store, events::EventLog& log, policy::EffectivePolicy baseline,
                         ProxyOptions options)
    : store_(store), log_(log), baseline_(baseline), options_(std::move(options)) {}

ProxyServer::~ProxyServer() {
    stop();
}

void ProxyServer::bind() {
    listener_ = Listener::bind(options_.host, options_.port);
}

std::uint16_t ProxyServer::port() const {
    return listener_ ? listener_->port() : 0;
}

void ProxyServer::start() {
    if (!listener_) {
        bind();
    }
    acceptor_ = std::thread([this] { accept_loop(); });
}

void ProxyServer::stop() {
    if (stopping_.exchange(true)) {
        return;
    }
    if (listener_) {
        listener_->shutdown();
    }
    if (acceptor_.joinable()) {
        acceptor_.join();
    }
    std::unique_lock lock(active_mutex_);
    for (int fd : active_fds_) {
        ::shutdown(fd, SHUT_RDWR);
    }
    idle_.wait(lock, [&] { return active_handlers_ == 0; });
}

void ProxyServer::accept_loop() {
    while (!stopping_) {
        std::string peer;
        Socket client = listener_->accept(peer);
        if (!client.valid()) {
            break;
        }
        if (stopping_) {
            break;
        }
        {
            std::lock_guard lock(active_mutex_);
            ++active_handlers_;
            active_fds_.insert(client.fd());
        }
        std::thread([this, c = std::move(client), p = std::move(peer)]() mutable { serve(std::move(c), std::move(p)); })
            .detach();
    }
}

void ProxyServer::serve(Socket client, std::string peer) {
    client.set_timeouts(options_.io_timeout);
    {
        Connection conn(*this, client, std::move(peer));
        conn.run();
    }
    std::lock_guard lock(active_mutex_);
    active_fds_.erase(client.fd());
    client.close();
    --active_handlers_;
    idle_.notify_all();
}

}  // namespace filterplus::proxy
