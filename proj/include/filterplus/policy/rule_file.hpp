#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "filterplus/policy/rule_store.hpp"

namespace filterplus::policy {

// Malformed rule document. `locus` is "line L, column C" for syntax errors
// or a field path such as "rules[2].policies.cookies".
class RuleFileError : public std::runtime_error {
public:
    RuleFileError(const std::string& message, std::string locus)
        : std::runtime_error(locus + ": " + message), locus_(std::move(locus)) {}
    const std::string& locus() const { return locus_; }

private:
    std::string locus_;
};

using Json = nlohmann::ordered_json;

inline constexpr int kRuleFileVersion = 1;

Json to_json(const PolicySet& policies);
Json to_json(const EffectivePolicy& policy);
Json to_json(const Rule& rule);
// {"version": 1, "default": ..., "rules": [...]} with `shown_default` as "default".
Json to_document(const RuleSet& rules, const EffectivePolicy& shown_default);

// Partial policy-object; unknown keys and unknown policy names are errors.
PolicySet policy_from_json(const nlohmann::json& value, const std::string& locus);
// Parses a JSON text expected to hold one policy-object.
PolicySet parse_policy_object(std::string_view text);

std::string serialize_rule_file(const RuleSet& rules);
RuleSet parse_rule_file(std::string_view text);

// Atomic replace: write a sibling temp file, fsync, rename.
void save_store(const RuleSet& rules, const std::filesystem::path& path);
RuleSet load_store(const std::filesystem::path& path);

}  // namespace filterplus::policy
