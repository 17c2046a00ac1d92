#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "filterplus/control/app.hpp"

using namespace filterplus;

int main(int argc, char** argv) {
    CLI::App cli{"filterplus: forward HTTP proxy with per-site content rules"};

    std::string listen = "127.0.0.1:8888";
    std::string control_listen = "127.0.0.1:8899";
    std::string rules_file = "./filterplus-rules.json";
    std::size_t log_capacity = 1024;
    std::string console_dir;
    std::string console_origin;
    std::array<std::string, 5> defaults;

    cli.add_option("--listen", listen, "proxy address host:port")->capture_default_str();
    cli.add_option("--control-listen", control_listen, "control API address host:port")->capture_default_str();
    cli.add_option("--rules-file", rules_file, "rule file (created if missing)")->capture_default_str();
    cli.add_option("--log-capacity", log_capacity, "events kept in memory")->capture_default_str();
    cli.add_option("--console-dir", console_dir, "static files served at the control root");
    cli.add_option("--console-origin", console_origin, "origin allowed to call the control API (CORS)");
    for (auto f : policy::kFields) {
        auto i = static_cast<std::size_t>(f);
        auto name = std::string(policy::to_string(f));
        cli.add_option("--default-" + name, defaults[i], "baseline " + name + " policy (" +
                                                             std::string(policy::allowed_names(f)) + ")");
    }
    CLI11_PARSE(cli, argc, argv);

    control::ServerConfig config;
    try {
        config.proxy_listen = control::parse_listen_address(listen);
        config.control_listen = control::parse_listen_address(control_listen);
        config.rules_path = rules_file;
        config.log_capacity = log_capacity;
        if (!console_dir.empty()) {
            config.console_dir = console_dir;
        }
        config.console_origin = console_origin;
        for (auto f : policy::kFields) {
            const auto& value = defaults[static_cast<std::size_t>(f)];
            if (!value.empty() && !config.baseline_overrides.set(f, value)) {
                throw control::ConfigError("--default-" + std::string(policy::to_string(f)) + ": unknown policy '" +
                                           value + "' (expected " + std::string(policy::allowed_names(f)) + ")");
            }
        }
        config.validate();
    } catch (const control::ConfigError& e) {
        std::cerr << "filterplus: " << e.what() << "\n";
        return 2;
    }

    // Block before any thread exists so every thread inherits the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::signal(SIGPIPE, SIG_IGN);

    control::App app(config);
    try {
        app.start(std::cout);
    } catch (const control::StartupError& e) {
        std::cerr << "filterplus: " << e.what() << "\n";
        return 1;
    }

    int sig = 0;
    sigwait(&signals, &sig);
    std::cout << "filterplus: shutting down\n";
    app.stop();
    return 0;
}
