#include "filterplus/policy/rule_file.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace filterplus::policy {

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void check_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& locus) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw RuleFileError("unknown key '" + key + "'", locus.empty() ? key : locus + "." + key);
        }
    }
}

std::string join(const std::string& locus, std::string_view key) {
    return locus.empty() ? std::string(key) : locus + "." + std::string(key);
}

[[noreturn]] void throw_errno(const std::string& what, const std::filesystem::path& path) {
    throw std::runtime_error(what + " " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

Json to_json(const PolicySet& policies) {
    Json out = Json::object();
    for (auto f : kFields) {
        if (auto name = policies.name_of(f)) {
            out[std::string(to_string(f))] = std::string(*name);
        }
    }
    return out;
}

Json to_json(const EffectivePolicy& policy) {
    return to_json(policy.as_policy_set());
}

Json to_json(const Rule& rule) {
    Json out = Json::object();
    out["pattern"] = rule.pattern.text();
    out["policies"] = to_json(rule.policies);
    out["modified_at"] = format_rfc3339(rule.modified_at);
    return out;
}

Json to_document(const RuleSet& rules, const EffectivePolicy& shown_default) {
    Json doc = Json::object();
    doc["version"] = kRuleFileVersion;
    doc["default"] = to_json(shown_default);
    doc["rules"] = Json::array();
    for (const auto& rule : rules.list()) {
        doc["rules"].push_back(to_json(rule));
    }
    return doc;
}

PolicySet policy_from_json(const nlohmann::json& value, const std::string& locus) {
    if (!value.is_object()) {
        throw RuleFileError("expected a policy object", locus.empty() ? "policies" : locus);
    }
    PolicySet out;
    for (const auto& [key, item] : value.items()) {
        auto field = parse_field(key);
        auto where = join(locus, key);
        if (!field) {
            throw RuleFileError("unknown category '" + key + "'", where);
        }
        if (!item.is_string()) {
            throw RuleFileError("policy must be a string", where);
        }
        auto name = item.get<std::string>();
        if (!out.set(*field, name)) {
            throw RuleFileError("unknown policy '" + name + "' (expected " +
                                    std::string(allowed_names(*field)) + ")",
                                where);
        }
    }
    return out;
}

PolicySet parse_policy_object(std::string_view text) {
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw RuleFileError("invalid JSON", line_column(text, e.byte == 0 ? 0 : e.byte - 1));
    }
    return policy_from_json(value, "");
}

std::string serialize_rule_file(const RuleSet& rules) {
    return to_document(rules, rules.file_default()).dump(2) + "\n";
}

RuleSet parse_rule_file(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw RuleFileError("invalid JSON", line_column(text, e.byte == 0 ? 0 : e.byte - 1));
    }
    if (!doc.is_object()) {
        throw RuleFileError("expected a top-level object", "document");
    }
    check_keys(doc, {"version", "default", "rules"}, "");
    if (!doc.contains("version") || !doc["version"].is_number_integer() ||
        doc["version"].get<long long>() != kRuleFileVersion) {
        throw RuleFileError("unsupported or missing version (expected 1)", "version");
    }

    RuleSet rules;
    if (doc.contains("default")) {
        rules.set_file_default(overlay(EffectivePolicy::builtin_baseline(), policy_from_json(doc["default"], "default")));
    }
    if (!doc.contains("rules")) {
        return rules;
    }
    const auto& list = doc["rules"];
    if (!list.is_array()) {
        throw RuleFileError("expected an array", "rules");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto locus = "rules[" + std::to_string(i) + "]";
        const auto& item = list[i];
        if (!item.is_object()) {
            throw RuleFileError("expected a rule object", locus);
        }
        check_keys(item, {"pattern", "policies", "modified_at"}, locus);
        if (!item.contains("pattern") || !item["pattern"].is_string()) {
            throw RuleFileError("missing pattern", locus + ".pattern");
        }
        std::optional<SitePattern> pattern;
        try {
            pattern = SitePattern::parse(item["pattern"].get<std::string>());
        } catch (const PatternError& e) {
            throw RuleFileError(std::string(e.what()) + " (" + e.locus() + ")", locus + ".pattern");
        }
        PolicySet policies;
        if (item.contains("policies")) {
            policies = policy_from_json(item["policies"], locus + ".policies");
        }
        if (!item.contains("modified_at") || !item["modified_at"].is_string()) {
            throw RuleFileError("missing modified_at", locus + ".modified_at");
        }
        auto stamp = parse_rfc3339(item["modified_at"].get<std::string>());
        if (!stamp) {
            throw RuleFileError("not an RFC 3339 timestamp", locus + ".modified_at");
        }
        if (!rules.insert(Rule{*pattern, policies, *stamp})) {
            throw RuleFileError("duplicate pattern '" + pattern->text() + "'", locus + ".pattern");
        }
    }
    return rules;
}

void save_store(const RuleSet& rules, const std::filesystem::path& path) {
    auto text = serialize_rule_file(rules);
    auto tmp = path;
    tmp += ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw_errno("cannot write", tmp);
    }
    std::size_t written = 0;
    while (written < text.size()) {
        auto n = ::write(fd, text.data() + written, text.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            ::close(fd);
            throw_errno("write failed for", tmp);
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        throw_errno("fsync failed for", tmp);
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        throw_errno("cannot rename onto", path);
    }
    auto dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    if (int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC); dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

RuleSet load_store(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rule_file(buf.str());
}

}  // namespace filterplus::policy
