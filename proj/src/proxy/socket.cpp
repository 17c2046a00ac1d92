#include "filterplus/proxy/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "filterplus/http/message.hpp"

namespace filterplus::proxy {

namespace {

std::string errno_text(const std::string& what) {
    return what + ": " + std::strerror(errno);
}

}  // namespace

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.release();
    }
    return *this;
}

int Socket::release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::shutdown_both() const {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
    }
}

void Socket::set_timeouts(std::chrono::milliseconds timeout) const {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

Socket connect_tcp(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* results = nullptr;
    auto service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &results); rc != 0) {
        throw SocketError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no addresses for " + host;
    for (auto* ai = results; ai != nullptr; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) {
            last_error = errno_text("socket");
            continue;
        }
        int flags = ::fcntl(s.fd(), F_GETFL, 0);
        ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(s.fd(), ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            pollfd pfd{s.fd(), POLLOUT, 0};
            rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
            if (rc == 1) {
                int err = 0;
                socklen_t len = sizeof err;
                ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
                errno = err;
                rc = err == 0 ? 0 : -1;
            } else {
                errno = rc == 0 ? ETIMEDOUT : errno;
                rc = -1;
            }
        }
        if (rc != 0) {
            last_error = errno_text("connect to " + host + ":" + service);
            continue;
        }
        ::fcntl(s.fd(), F_SETFL, flags);
        int one = 1;
        ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        ::freeaddrinfo(results);
        return s;
    }
    ::freeaddrinfo(results);
    throw SocketError(last_error);
}

Listener Listener::bind(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
    addrinfo* results = nullptr;
    auto service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &results); rc != 0) {
        throw SocketError("cannot resolve listen address " + host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no usable address for " + host;
    for (auto* ai = results; ai != nullptr; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) {
            last_error = errno_text("socket");
            continue;
        }
        int one = 1;
        ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(s.fd(), 128) != 0) {
            last_error = errno_text("cannot listen on " + host + ":" + service);
            continue;
        }
        sockaddr_storage addr{};
        socklen_t len = sizeof addr;
        ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
        Listener l;
        l.port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                                   : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
        l.host_ = host;
        l.socket_ = std::move(s);
        ::freeaddrinfo(results);
        return l;
    }
    ::freeaddrinfo(results);
    throw SocketError(last_error);
}

Socket Listener::accept(std::string& peer) {
    for (;;) {
        sockaddr_storage addr{};
        socklen_t len = sizeof addr;
        int fd = ::accept4(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), &len, SOCK_CLOEXEC);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED || errno == EMFILE || errno == ENFILE) {
                if (errno == EMFILE || errno == ENFILE) {
                    ::usleep(10000);
                }
                continue;
            }
            return Socket{};
        }
        char text[INET6_ADDRSTRLEN] = {};
        if (addr.ss_family == AF_INET) {
            ::inet_ntop(AF_INET, &reinterpret_cast<sockaddr_in*>(&addr)->sin_addr, text, sizeof text);
        } else if (addr.ss_family == AF_INET6) {
            ::inet_ntop(AF_INET6, &reinterpret_cast<sockaddr_in6*>(&addr)->sin6_addr, text, sizeof text);
        }
        peer = text;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return Socket(fd);
    }
}

std::optional<std::string> Stream::read_head(std::size_t max_bytes) {
    std::size_t scanned = 0;
    for (;;) {
        // A head may end in "\n\n" or "\n\r\n"; rescan a little overlap.
        auto from = scanned > 2 ? scanned - 2 : 0;
        auto end = http::find_head_end(std::string_view(buffer_).substr(from));
        if (end != std::string_view::npos) {
            end += from;
            std::string head = buffer_.substr(0, end);
            buffer_.erase(0, end);
            return head;
        }
        scanned = buffer_.size();
        if (buffer_.size() > max_bytes) {
            throw SocketError("message head too large");
        }
        char chunk[16 * 1024];
        auto n = ::recv(socket_.fd(), chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw SocketError(errno_text("read"));
        }
        if (n == 0) {
            if (buffer_.empty()) {
                return std::nullopt;
            }
            throw SocketError("connection closed mid-head");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::size_t Stream::read_some(std::string& out, std::size_t max) {
    if (!buffer_.empty()) {
        auto take = std::min(max, buffer_.size());
        out.append(buffer_, 0, take);
        buffer_.erase(0, take);
        return take;
    }
    std::string chunk(std::min<std::size_t>(max, 64 * 1024), '\0');
    for (;;) {
        auto n = ::recv(socket_.fd(), chunk.data(), chunk.size(), 0);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw SocketError(errno_text("read"));
        }
        out.append(chunk.data(), static_cast<std::size_t>(n));
        return static_cast<std::size_t>(n);
    }
}

bool Stream::write_all(std::string_view bytes) {
    while (!bytes.empty()) {
        auto n = ::send(socket_.fd(), bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return false;
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

std::string Stream::take_buffered() {
    std::string out = std::move(buffer_);
    buffer_.clear();
    return out;
}

}  // namespace filterplus::proxy
