#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "filterplus/events/event_log.hpp"
#include "filterplus/policy/rule_store.hpp"

namespace httplib {
class Server;
}

namespace filterplus::control {

struct ControlOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8899;
    std::filesystem::path rules_path;
    std::optional<std::filesystem::path> console_dir;
    std::string console_origin;
};

// Maximum time a GET /api/events long-poll may be held open.
inline constexpr int kMaxEventWaitSeconds = 30;

// JSON control API over the rule store and event log:
//   GET    /api/rules
//   PUT    /api/rules/{pattern}     body: policy object
//   DELETE /api/rules/{pattern}
//   GET    /api/resolve?url=
//   GET    /api/events?since=N[&wait=S]
// Mutations are written through to rules_path before the response is sent.
class ControlServer {
public:
    ControlServer(policy::RuleStore& store, events::EventLog& log, policy::EffectivePolicy baseline,
                  ControlOptions options);
    ~ControlServer();
    ControlServer(const ControlServer&) = delete;
    ControlServer& operator=(const ControlServer&) = delete;

    // Throws std::runtime_error when the address cannot be bound.
    void bind();
    std::uint16_t port() const { return port_; }
    void start();
    void stop();

private:
    void install_routes();

    policy::RuleStore& store_;
    events::EventLog& log_;
    const policy::EffectivePolicy baseline_;
    const ControlOptions options_;
    std::unique_ptr<httplib::Server> server_;
    std::uint16_t port_ = 0;
    std::thread thread_;
};

}  // namespace filterplus::control
