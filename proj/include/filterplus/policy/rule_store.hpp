#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "filterplus/http/url.hpp"
#include "filterplus/policy/policy.hpp"
#include "filterplus/policy/site_pattern.hpp"
#include "filterplus/policy/timestamp.hpp"

namespace filterplus::policy {

struct Rule {
    SitePattern pattern;
    PolicySet policies;
    Timestamp modified_at;

    bool operator==(const Rule&) const = default;
};

enum class Tier { exact, wildcard, global_default, baseline };

struct FieldSource {
    Tier tier = Tier::baseline;
    std::string pattern = "baseline";

    bool operator==(const FieldSource&) const = default;
};

struct Resolution {
    EffectivePolicy policy;
    std::array<FieldSource, 5> provenance;  // indexed by Field

    const FieldSource& source(Field f) const { return provenance[static_cast<std::size_t>(f)]; }
};

// Value type: the whole persisted state. Rules are unique per pattern text
// and kept in byte order of that text.
class RuleSet {
public:
    RuleSet() = default;
    explicit RuleSet(EffectivePolicy file_default) : file_default_(file_default) {}

    // Merges into an existing rule for the pattern or creates one.
    const Rule& upsert(const SitePattern& pattern, const PolicySet& policies, Timestamp now);
    // Inserts a rule verbatim; used when loading. Returns false on a duplicate.
    bool insert(Rule rule);
    bool erase(const SitePattern& pattern);
    const Rule* find(std::string_view pattern_text) const;

    std::vector<Rule> list() const;
    std::size_t size() const { return rules_.size(); }

    // Per field: exact host > longest-suffix wildcard > "*" > baseline.
    Resolution resolve(std::string_view host, const EffectivePolicy& baseline) const;

    // The "default" object carried in the rule file.
    const EffectivePolicy& file_default() const { return file_default_; }
    void set_file_default(const EffectivePolicy& p) { file_default_ = p; }

    bool operator==(const RuleSet&) const = default;

private:
    std::map<std::string, Rule, std::less<>> rules_;
    EffectivePolicy file_default_ = EffectivePolicy::builtin_baseline();
};

// Resolves the host of an absolute URL; throws http::UrlError when there is none.
Resolution resolve_policy(const RuleSet& rules, std::string_view url, const EffectivePolicy& baseline);

// Shared, concurrently readable rule store. Readers take an immutable
// snapshot; writers are serialized, build a modified copy, optionally persist
// it, and only then publish it. A persist failure leaves the store unchanged.
class RuleStore {
public:
    using Persist = std::function<void(const RuleSet&)>;
    using Clock = std::function<Timestamp()>;

    explicit RuleStore(RuleSet initial = {}, Clock clock = now_seconds);

    std::shared_ptr<const RuleSet> snapshot() const;

    Rule upsert(const SitePattern& pattern, const PolicySet& policies, const Persist& persist = {});
    bool remove(const SitePattern& pattern, const Persist& persist = {});

private:
    void publish(std::shared_ptr<const RuleSet> next);

    mutable std::shared_mutex current_mutex_;
    std::shared_ptr<const RuleSet> current_;
    std::mutex writer_mutex_;
    Clock clock_;
};

}  // namespace filterplus::policy
