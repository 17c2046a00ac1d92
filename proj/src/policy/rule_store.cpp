#include "filterplus/policy/rule_store.hpp"

namespace filterplus::policy {

const Rule& RuleSet::upsert(const SitePattern& pattern, const PolicySet& policies, Timestamp now) {
    auto it = rules_.find(pattern.text());
    if (it == rules_.end()) {
        it = rules_.emplace(pattern.text(), Rule{pattern, policies, now}).first;
    } else {
        it->second.policies.merge_from(policies);
        it->second.modified_at = now;
    }
    return it->second;
}

bool RuleSet::insert(Rule rule) {
    auto key = rule.pattern.text();
    return rules_.emplace(std::move(key), std::move(rule)).second;
}

bool RuleSet::erase(const SitePattern& pattern) {
    return rules_.erase(pattern.text()) > 0;
}

const Rule* RuleSet::find(std::string_view pattern_text) const {
    auto it = rules_.find(pattern_text);
    return it == rules_.end() ? nullptr : &it->second;
}

std::vector<Rule> RuleSet::list() const {
    std::vector<Rule> out;
    out.reserve(rules_.size());
    for (const auto& [_, rule] : rules_) {
        out.push_back(rule);
    }
    return out;
}

Resolution RuleSet::resolve(std::string_view host, const EffectivePolicy& baseline) const {
    // Candidates in precedence order.
    std::vector<std::pair<const Rule*, Tier>> candidates;
    if (const auto* exact = find(host)) {
        candidates.emplace_back(exact, Tier::exact);
    }
    std::string key;
    for (auto dot = host.find('.'); dot != std::string_view::npos; dot = host.find('.', dot + 1)) {
        key.assign("*.");
        key.append(host.substr(dot + 1));
        if (const auto* wild = find(key)) {
            candidates.emplace_back(wild, Tier::wildcard);
        }
    }
    if (const auto* global = find("*")) {
        candidates.emplace_back(global, Tier::global_default);
    }

    Resolution out{baseline, {}};
    for (auto f : kFields) {
        for (const auto& [rule, tier] : candidates) {
            if (rule->policies.is_set(f)) {
                out.policy.take(f, rule->policies);
                out.provenance[static_cast<std::size_t>(f)] = {tier, rule->pattern.text()};
                break;
            }
        }
    }
    return out;
}

Resolution resolve_policy(const RuleSet& rules, std::string_view url, const EffectivePolicy& baseline) {
    return rules.resolve(http::parse_absolute_url(url).host, baseline);
}

RuleStore::RuleStore(RuleSet initial, Clock clock)
    : current_(std::make_shared<const RuleSet>(std::move(initial))), clock_(std::move(clock)) {}

std::shared_ptr<const RuleSet> RuleStore::snapshot() const {
    std::shared_lock lock(current_mutex_);
    return current_;
}

void RuleStore::publish(std::shared_ptr<const RuleSet> next) {
    std::unique_lock lock(current_mutex_);
    current_ = std::move(next);
}

Rule RuleStore::upsert(const SitePattern& pattern, const PolicySet& policies, const Persist& persist) {
    std::lock_guard writer(writer_mutex_);
    auto next = std::make_shared<RuleSet>(*snapshot());
    Rule rule = next->upsert(pattern, policies, clock_());
    if (persist) {
        persist(*next);
    }
    publish(std::move(next));
    return rule;
}

bool RuleStore::remove(const SitePattern& pattern, const Persist& persist) {
    std::lock_guard writer(writer_mutex_);
    auto next = std::make_shared<RuleSet>(*snapshot());
    if (!next->erase(pattern)) {
        return false;
    }
    if (persist) {
        persist(*next);
    }
    publish(std::move(next));
    return true;
}

}  // namespace filterplus::policy
