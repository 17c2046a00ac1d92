#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace filterplus::proxy {

class SocketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Owning file descriptor for a TCP socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket() { close(); }
    Socket(Socket&& other) noexcept : fd_(other.release()) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release();
    void close();
    // Wakes any thread blocked on this socket without releasing the fd.
    void shutdown_both() const;
    void set_timeouts(std::chrono::milliseconds timeout) const;

private:
    int fd_ = -1;
};

Socket connect_tcp(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);

class Listener {
public:
    // Port 0 picks an ephemeral port. Throws SocketError (e.g. address in use).
    static Listener bind(const std::string& host, std::uint16_t port);

    std::uint16_t port() const { return port_; }
    const std::string& host() const { return host_; }
    // Returns an invalid Socket once the listener has been shut down.
    Socket accept(std::string& peer);
    void shutdown() const { socket_.shutdown_both(); }

private:
    Socket socket_;
    std::string host_;
    std::uint16_t port_ = 0;
};

// Buffered reader/writer over a borrowed socket.
class Stream {
public:
    explicit Stream(const Socket& socket) : socket_(socket) {}

    // Reads through the end of a message head. nullopt on clean EOF before
    // any byte; throws SocketError on timeout, I/O error, truncation or a head
    // longer than max_bytes.
    std::optional<std::string> read_head(std::size_t max_bytes);
    // Appends up to `max` bytes (buffered bytes first); 0 means EOF.
    std::size_t read_some(std::string& out, std::size_t max = 64 * 1024);
    bool write_all(std::string_view bytes);
    // Bytes already read past the last head.
    std::string take_buffered();

private:
    const Socket& socket_;
    std::string buffer_;
};

}  // namespace filterplus::proxy
