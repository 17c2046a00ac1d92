#include "filterplus/events/event_log.hpp"

#include <algorithm>
#include <stdexcept>

namespace filterplus::events {

std::string_view to_string(Category c) {
    switch (c) {
    case Category::cookies: return "cookies";
    case Category::images: return "images";
    case Category::javascript: return "javascript";
    case Category::popups: return "popups";
    case Category::notifications: return "notifications";
    case Category::tunnel: return "tunnel";
    case Category::upstream: return "upstream";
    }
    return {};
}

std::string_view to_string(Action a) {
    switch (a) {
    case Action::blocked: return "blocked";
    case Action::modified: return "modified";
    case Action::would_ask: return "would-ask";
    case Action::bypassed: return "bypassed";
    }
    return {};
}

std::optional<Category> parse_category(std::string_view s) {
    for (auto c : {Category::cookies, Category::images, Category::javascript, Category::popups,
                   Category::notifications, Category::tunnel, Category::upstream}) {
        if (to_string(c) == s) {
            return c;
        }
    }
    return std::nullopt;
}

std::optional<Action> parse_action(std::string_view s) {
    for (auto a : {Action::blocked, Action::modified, Action::would_ask, Action::bypassed}) {
        if (to_string(a) == s) {
            return a;
        }
    }
    return std::nullopt;
}

EventLog::EventLog(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw std::invalid_argument("event log capacity must be at least 1");
    }
}

std::uint64_t EventLog::append(Category category, Action action, std::string url, std::string matched_pattern,
                               std::string detail) {
    std::uint64_t seq;
    {
        std::lock_guard lock(mutex_);
        seq = next_seq_++;
        if (ring_.size() == capacity_) {
            ring_.pop_front();
        }
        ring_.push_back(FilterEvent{seq, policy::now_seconds(), category, action, std::move(url),
                                    std::move(matched_pattern), std::move(detail)});
    }
    changed_.notify_all();
    return seq;
}

EventPage EventLog::collect(std::uint64_t since) const {
    EventPage page;
    page.latest = next_seq_ - 1;
    auto first = std::find_if(ring_.begin(), ring_.end(), [&](const FilterEvent& e) { return e.seq > since; });
    page.events.assign(first, ring_.end());
    return page;
}

EventPage EventLog::since(std::uint64_t since) const {
    std::lock_guard lock(mutex_);
    return collect(since);
}

EventPage EventLog::wait_since(std::uint64_t since, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    changed_.wait_for(lock, timeout, [&] { return cancelled_ || next_seq_ - 1 > since; });
    return collect(since);
}

void EventLog::cancel_waiters() {
    {
        std::lock_guard lock(mutex_);
        cancelled_ = true;
    }
    changed_.notify_all();
}

std::uint64_t EventLog::latest() const {
    std::lock_guard lock(mutex_);
    return next_seq_ - 1;
}

}  // namespace filterplus::events
