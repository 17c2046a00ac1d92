#pragma once

#include <memory>
#include <ostream>
#include <stdexcept>

#include "filterplus/control/config.hpp"
#include "filterplus/control/control_server.hpp"
#include "filterplus/events/event_log.hpp"
#include "filterplus/policy/rule_store.hpp"
#include "filterplus/proxy/proxy_server.hpp"

namespace filterplus::control {

class StartupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The whole process: rule store, event log, proxy and control listeners.
class App {
public:
    explicit App(ServerConfig config);
    ~App();

    // Loads (or creates) the rule file and binds both listeners, then starts
    // serving. Writes one line per listener to `log`. Throws StartupError.
    void start(std::ostream& log);
    // Stops both listeners and persists the store.
    void stop();

    std::uint16_t proxy_port() const;
    std::uint16_t control_port() const;
    const policy::EffectivePolicy& baseline() const { return baseline_; }
    policy::RuleStore& store() { return *store_; }
    events::EventLog& events() { return *log_; }

private:
    ServerConfig config_;
    policy::EffectivePolicy baseline_;
    std::unique_ptr<policy::RuleStore> store_;
    std::unique_ptr<events::EventLog> log_;
    std::unique_ptr<proxy::ProxyServer> proxy_;
    std::unique_ptr<ControlServer> control_;
    bool running_ = false;
};

}  // namespace filterplus::control
