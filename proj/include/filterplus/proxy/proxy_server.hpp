#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "filterplus/events/event_log.hpp"
#include "filterplus/policy/rule_store.hpp"
#include "filterplus/proxy/filter.hpp"
#include "filterplus/proxy/socket.hpp"

namespace filterplus::proxy {

struct ProxyOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8888;
    std::chrono::milliseconds io_timeout{30000};
    std::chrono::milliseconds connect_timeout{10000};
    std::chrono::milliseconds tunnel_idle_timeout{300000};
    std::size_t max_head_bytes = 64 * 1024;
};

// HTTP/1.1 forward proxy: absolute-form http:// targets and CONNECT. One
// thread per client connection; handlers share only the rule store (through
// snapshots) and the event log.
class ProxyServer {
public:
    ProxyServer(const policy::RuleStore& store, events::EventLog& log, policy::EffectivePolicy baseline,
                ProxyOptions options = {});
    ~ProxyServer();
    ProxyServer(const ProxyServer&) = delete;
    ProxyServer& operator=(const ProxyServer&) = delete;

    // Binds the listener; throws SocketError.
    void bind();
    std::uint16_t port() const;
    void start();
    // Stops accepting, interrupts open connections and waits for handlers.
    void stop();

    const policy::EffectivePolicy& baseline() const { return baseline_; }

private:
    class Connection;

    void accept_loop();
    void serve(Socket client, std::string peer);

    const policy::RuleStore& store_;
    events::EventLog& log_;
    const policy::EffectivePolicy baseline_;
    const ProxyOptions options_;

    std::optional<Listener> listener_;
    std::thread acceptor_;
    std::atomic<bool> stopping_{false};

    std::mutex active_mutex_;
    std::condition_variable idle_;
    std::set<int> active_fds_;
    std::size_t active_handlers_ = 0;
};

}  // namespace filterplus::proxy
