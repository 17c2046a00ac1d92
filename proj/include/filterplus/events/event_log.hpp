#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filterplus/policy/timestamp.hpp"

namespace filterplus::events {

enum class Category { cookies, images, javascript, popups, notifications, tunnel, upstream };
enum class Action { blocked, modified, would_ask, bypassed };

std::string_view to_string(Category c);
std::string_view to_string(Action a);
std::optional<Category> parse_category(std::string_view s);
std::optional<Action> parse_action(std::string_view s);

struct FilterEvent {
    std::uint64_t seq = 0;
    policy::Timestamp timestamp;
    Category category = Category::cookies;
    Action action = Action::blocked;
    std::string url;
    std::string matched_pattern = "baseline";
    std::string detail;
};

struct EventPage {
    std::vector<FilterEvent> events;  // seq ascending
    std::uint64_t latest = 0;
};

// Bounded ring of FilterEvents. Appends assign seq under the lock, so seq
// order is the linearization order; the oldest entry is evicted when full.
class EventLog {
public:
    explicit EventLog(std::size_t capacity);

    std::uint64_t append(Category category, Action action, std::string url, std::string matched_pattern,
                         std::string detail = {});

    // Events with seq > since that are still retained.
    EventPage since(std::uint64_t since) const;
    // Like since(), but waits up to `timeout` for a newer event when there is
    // none yet. Wakes early when cancel_waiters() is called.
    EventPage wait_since(std::uint64_t since, std::chrono::milliseconds timeout) const;
    void cancel_waiters();

    std::uint64_t latest() const;
    std::size_t capacity() const { return capacity_; }

private:
    EventPage collect(std::uint64_t since) const;

    const std::size_t capacity_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::deque<FilterEvent> ring_;
    std::uint64_t next_seq_ = 1;
    bool cancelled_ = false;
};

}  // namespace filterplus::events
