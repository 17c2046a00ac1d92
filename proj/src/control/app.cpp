#include "filterplus/control/app.hpp"

#include <filesystem>
#include <iostream>

#include "filterplus/policy/rule_file.hpp"

namespace filterplus::control {

App::App(ServerConfig config) : config_(std::move(config)) {}

App::~App() {
    stop();
}

void App::start(std::ostream& log) {
    try {
        config_.validate();
    } catch (const ConfigError& e) {
        throw StartupError(e.what());
    }

    policy::RuleSet rules;
    std::error_code ec;
    if (std::filesystem::exists(config_.rules_path, ec)) {
        try {
            rules = policy::load_store(config_.rules_path);
        } catch (const std::exception& e) {
            throw StartupError("cannot load rules file " + config_.rules_path.string() + ": " + e.what());
        }
    } else {
        try {
            policy::save_store(rules, config_.rules_path);
        } catch (const std::exception& e) {
            throw StartupError("cannot create rules file " + config_.rules_path.string() + ": " + e.what());
        }
    }

    baseline_ = policy::overlay(rules.file_default(), config_.baseline_overrides);
    store_ = std::make_unique<policy::RuleStore>(std::move(rules));
    log_ = std::make_unique<events::EventLog>(config_.log_capacity);

    proxy::ProxyOptions proxy_options;
    proxy_options.host = config_.proxy_listen.host;
    proxy_options.port = config_.proxy_listen.port;
    proxy_ = std::make_unique<proxy::ProxyServer>(*store_, *log_, baseline_, proxy_options);

    ControlOptions control_options;
    control_options.host = config_.control_listen.host;
    control_options.port = config_.control_listen.port;
    control_options.rules_path = config_.rules_path;
    control_options.console_dir = config_.console_dir;
    control_options.console_origin = config_.console_origin;

    try {
        control_ = std::make_unique<ControlServer>(*store_, *log_, baseline_, control_options);
        proxy_->bind();
        control_->bind();
    } catch (const std::exception& e) {
        proxy_.reset();
        control_.reset();
        throw StartupError(e.what());
    }

    proxy_->start();
    control_->start();
    running_ = true;
    log << "filterplus: proxy listening on " << ListenAddress{config_.proxy_listen.host, proxy_->port()}.to_string()
        << "\n";
    log << "filterplus: control listening on "
        << ListenAddress{config_.control_listen.host, control_->port()}.to_string() << "\n";
    log.flush();
}

void App::stop() {
    if (!running_) {
        return;
    }
    running_ = false;
    control_->stop();
    proxy_->stop();
    try {
        policy::save_store(*store_->snapshot(), config_.rules_path);
    } catch (const std::exception& e) {
        std::cerr << "filterplus: failed to persist rules on shutdown: " << e.what() << "\n";
    }
}

std::uint16_t App::proxy_port() const {
    return proxy_ ? proxy_->port() : 0;
}

std::uint16_t App::control_port() const {
    return control_ ? control_->port() : 0;
}

}  // namespace filterplus::control
