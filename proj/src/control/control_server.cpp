#include "filterplus/control/control_server.hpp"

#include <charconv>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "filterplus/http/url.hpp"
#include "filterplus/policy/rule_file.hpp"

namespace filterplus::control {

using policy::Json;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump() + "\n", kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message, const std::string& field) {
    Json body;
    body["error"] = message;
    body["field"] = field;
    send_json(res, status, body);
}

std::string_view to_string(policy::Tier tier) {
    switch (tier) {
    case policy::Tier::exact: return "exact";
    case policy::Tier::wildcard: return "wildcard";
    case policy::Tier::global_default: return "default";
    case policy::Tier::baseline: return "baseline";
    }
    return "baseline";
}

Json event_json(const events::FilterEvent& e) {
    Json j;
    j["seq"] = e.seq;
    j["timestamp"] = policy::format_rfc3339(e.timestamp);
    j["category"] = events::to_string(e.category);
    j["action"] = events::to_string(e.action);
    j["url"] = e.url;
    j["matched_pattern"] = e.matched_pattern;
    j["detail"] = e.detail;
    return j;
}

std::optional<std::uint64_t> parse_unsigned(const std::string& s) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

ControlServer::ControlServer(policy::RuleStore& store, events::EventLog& log, policy::EffectivePolicy baseline,
                             ControlOptions options)
    : store_(store), log_(log), baseline_(baseline), options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

ControlServer::~ControlServer() {
    stop();
}

void ControlServer::install_routes() {
    auto& s = *server_;

    s.Get("/api/rules", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, policy::to_document(*store_.snapshot(), baseline_));
    });

    auto persist = [this](const policy::RuleSet& rules) { policy::save_store(rules, options_.rules_path); };

    s.Put(R"(/api/rules/(.+))", [this, persist](const httplib::Request& req, httplib::Response& res) {
        policy::SitePattern pattern = policy::SitePattern::global();
        try {
            pattern = policy::SitePattern::parse(req.matches[1].str());
        } catch (const policy::PatternError& e) {
            send_error(res, 422, std::string(e.what()) + " (" + e.locus() + ")", "pattern");
            return;
        }
        policy::PolicySet update;
        try {
            update = policy::parse_policy_object(req.body);
        } catch (const policy::RuleFileError& e) {
            send_error(res, 422, e.what(), e.locus());
            return;
        }
        try {
            auto rule = store_.upsert(pattern, update, persist);
            send_json(res, 200, policy::to_json(rule));
        } catch (const std::exception& e) {
            send_error(res, 500, std::string("rule not saved: ") + e.what(), "rules_path");
        }
    });

    s.Delete(R"(/api/rules/(.+))", [this, persist](const httplib::Request& req, httplib::Response& res) {
        policy::SitePattern pattern = policy::SitePattern::global();
        try {
            pattern = policy::SitePattern::parse(req.matches[1].str());
        } catch (const policy::PatternError& e) {
            send_error(res, 422, std::string(e.what()) + " (" + e.locus() + ")", "pattern");
            return;
        }
        try {
            bool existed = store_.remove(pattern, persist);
            send_json(res, 200, Json{{"pattern", pattern.text()}, {"existed", existed}});
        } catch (const std::exception& e) {
            send_error(res, 500, std::string("rule not removed: ") + e.what(), "rules_path");
        }
    });

    s.Get("/api/resolve", [this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("url")) {
            send_error(res, 422, "missing url parameter", "url");
            return;
        }
        auto url_text = req.get_param_value("url");
        http::Url url;
        try {
            url = http::parse_absolute_url(url_text);
        } catch (const http::UrlError& e) {
            send_error(res, 422, e.what(), "url");
            return;
        }
        auto resolution = store_.snapshot()->resolve(url.host, baseline_);
        Json provenance = Json::object();
        Json tiers = Json::object();
        for (auto f : policy::kFields) {
            auto key = std::string(policy::to_string(f));
            provenance[key] = resolution.source(f).pattern;
            tiers[key] = to_string(resolution.source(f).tier);
        }
        Json body;
        body["url"] = url_text;
        body["host"] = url.host;
        body["policy"] = policy::to_json(resolution.policy);
        body["provenance"] = provenance;
        body["tiers"] = tiers;
        send_json(res, 200, body);
    });

    s.Get("/api/events", [this](const httplib::Request& req, httplib::Response& res) {
        std::uint64_t since = 0;
        if (req.has_param("since")) {
            auto v = parse_unsigned(req.get_param_value("since"));
            if (!v) {
                send_error(res, 422, "since must be a non-negative integer", "since");
                return;
            }
            since = *v;
        }
        std::uint64_t wait = 0;
        if (req.has_param("wait")) {
            auto v = parse_unsigned(req.get_param_value("wait"));
            if (!v) {
                send_error(res, 422, "wait must be a non-negative number of seconds", "wait");
                return;
            }
            wait = std::min<std::uint64_t>(*v, kMaxEventWaitSeconds);
        }
        auto page = wait == 0 ? log_.since(since) : log_.wait_since(since, std::chrono::seconds(wait));
        Json list = Json::array();
        for (const auto& e : page.events) {
            list.push_back(event_json(e));
        }
        send_json(res, 200, Json{{"events", list}, {"latest", page.latest}});
    });

    s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Methods", "GET, PUT, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Max-Age", "600");
    });

    s.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        if (!options_.console_origin.empty() && req.path.rfind("/api/", 0) == 0) {
            res.set_header("Access-Control-Allow-Origin", options_.console_origin);
            res.set_header("Vary", "Origin");
        }
    });

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) {
            return httplib::Server::HandlerResponse::Unhandled;
        }
        if (res.status == 404) {
            send_error(res, 404, "no such endpoint: " + req.method + " " + req.path, "path");
        } else {
            send_error(res, res.status, httplib::status_message(res.status), "request");
        }
        return httplib::Server::HandlerResponse::Handled;
    });

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send_error(res, 500, what, "request");
    });

    if (options_.console_dir) {
        if (!s.set_mount_point("/", options_.console_dir->string())) {
            throw std::runtime_error("console directory '" + options_.console_dir->string() + "' does not exist");
        }
    }
}

void ControlServer::bind() {
    if (options_.port == 0) {
        int port = server_->bind_to_any_port(options_.host);
        if (port <= 0) {
            throw std::runtime_error("cannot bind control listener on " + options_.host);
        }
        port_ = static_cast<std::uint16_t>(port);
        return;
    }
    if (!server_->bind_to_port(options_.host, options_.port)) {
        throw std::runtime_error("cannot bind control listener on " + options_.host + ":" +
                                 std::to_string(options_.port) + " (address in use?)");
    }
    port_ = options_.port;
}

void ControlServer::start() {
    if (port_ == 0) {
        bind();
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void ControlServer::stop() {
    log_.cancel_waiters();
    if (server_) {
        server_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

}  // namespace filterplus::control
