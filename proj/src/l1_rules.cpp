#include "trace/l1_rules.hpp"

#include "trace/digest.hpp"
#include "trace/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace trace {

const char* to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "eq";
        case CompareOp::ne: return "ne";
        case CompareOp::lt: return "lt";
        case CompareOp::le: return "le";
        case CompareOp::gt: return "gt";
        case CompareOp::ge: return "ge";
        case CompareOp::in_set: return "in";
    }
    return "eq";
}

CompareOp compare_op_from_string(const std::string& s) {
    if (s == "eq" || s == "=" || s == "==") return CompareOp::eq;
    if (s == "ne" || s == "!=") return CompareOp::ne;
    if (s == "lt" || s == "<") return CompareOp::lt;
    if (s == "le" || s == "<=") return CompareOp::le;
    if (s == "gt" || s == ">") return CompareOp::gt;
    if (s == "ge" || s == ">=") return CompareOp::ge;
    if (s == "in" || s == "in_set") return CompareOp::in_set;
    throw ConfigInvalid("unknown comparison operator: " + s);
}

const char* to_string(RuleActionKind k) {
    switch (k) {
        case RuleActionKind::allow: return "allow";
        case RuleActionKind::deny: return "deny";
        case RuleActionKind::mandate_escalation: return "mandate_escalation";
        case RuleActionKind::route: return "route";
    }
    return "allow";
}

std::string action_to_string(const RuleAction& a) {
    if (a.kind == RuleActionKind::route) return std::string("route:") + a.route_target;
    return to_string(a.kind);
}

namespace {

// risk classes compare ordinally: low < medium < high
std::optional<double> ordinal_of(const json& risk_name) {
    if (!risk_name.is_string()) return std::nullopt;
    const std::string& s = risk_name.get_ref<const std::string&>();
    if (s == "low") return 0.0;
    if (s == "medium") return 1.0;
    if (s == "high") return 2.0;
    return std::nullopt;
}

bool compare_numeric(double lhs, CompareOp op, double rhs) {
    switch (op) {
        case CompareOp::eq: return lhs == rhs;
        case CompareOp::ne: return lhs != rhs;
        case CompareOp::lt: return lhs < rhs;
        case CompareOp::le: return lhs <= rhs;
        case CompareOp::gt: return lhs > rhs;
        case CompareOp::ge: return lhs >= rhs;
        case CompareOp::in_set: return false;  // handled by caller
    }
    return false;
}

bool compare_string(const std::string& lhs, CompareOp op, const json& rhs) {
    if (!rhs.is_string()) return false;
    const std::string& r = rhs.get_ref<const std::string&>();
    switch (op) {
        case CompareOp::eq: return lhs == r;
        case CompareOp::ne: return lhs != r;
        default: return false;  // no ordering on categorical values
    }
}

bool in_set(const json& needle_num_or_str, const json& set) {
    if (!set.is_array()) return false;
    for (const json& e : set) {
        if (e == needle_num_or_str) return true;
    }
    return false;
}

bool atom_matches(const GuardAtom& atom, const TaskInstance& task) {
    if (atom.lhs == "risk_class") {
        const std::string current = to_string(task.risk_class);
        if (atom.op == CompareOp::in_set) return in_set(json(current), atom.rhs);
        if (atom.op == CompareOp::eq || atom.op == CompareOp::ne) {
            return compare_string(current, atom.op, atom.rhs);
        }
        const auto lhs_ord = ordinal_of(json(current));
        const auto rhs_ord = ordinal_of(atom.rhs);
        if (!lhs_ord || !rhs_ord) return false;
        return compare_numeric(*lhs_ord, atom.op, *rhs_ord);
    }
    if (atom.lhs == "task_type") {
        if (atom.op == CompareOp::in_set) return in_set(json(task.task_type), atom.rhs);
        return compare_string(task.task_type, atom.op, atom.rhs);
    }
    const auto it = task.features.find(atom.lhs);
    if (it == task.features.end()) return false;
    const FeatureValue& value = it->second;
    if (std::holds_alternative<double>(value)) {
        const double lhs = std::get<double>(value);
        if (atom.op == CompareOp::in_set) return in_set(json(lhs), atom.rhs);
        if (!atom.rhs.is_number()) return false;
        return compare_numeric(lhs, atom.op, atom.rhs.get<double>());
    }
    const std::string& lhs = std::get<std::string>(value);
    if (atom.op == CompareOp::in_set) return in_set(json(lhs), atom.rhs);
    return compare_string(lhs, atom.op, atom.rhs);
}

bool actions_conflict(const RuleAction& a, const RuleAction& b) {
    if (a.kind == RuleActionKind::allow && b.kind == RuleActionKind::deny) return true;
    if (a.kind == RuleActionKind::deny && b.kind == RuleActionKind::allow) return true;
    if (a.kind == RuleActionKind::route && b.kind == RuleActionKind::route) {
        return a.route_target != b.route_target;
    }
    return false;
}

} // namespace

bool guard_matches(const Rule& rule, const TaskInstance& task) {
    for (const GuardAtom& atom : rule.guard) {
        if (!atom_matches(atom, task)) return false;
    }
    return true;
}

RuleOutcome evaluate_rules(const RuleSet& ruleset, const TaskInstance& task) {
    RuleOutcome out;
    std::vector<const Rule*> matched;
    for (const Rule& r : ruleset.rules) {
        if (guard_matches(r, task)) matched.push_back(&r);
    }
    std::sort(matched.begin(), matched.end(), [](const Rule* a, const Rule* b) {
        if (a->priority != b->priority) return a->priority > b->priority;
        return a->rule_id < b->rule_id;
    });
    for (const Rule* r : matched) {
        out.matched.emplace_back(r->rule_id, r->action);
    }
    if (!matched.empty()) out.mandated_action = matched.front()->action;
    for (size_t i = 0; i < matched.size(); ++i) {
        for (size_t j = i + 1; j < matched.size(); ++j) {
            if (actions_conflict(matched[i]->action, matched[j]->action)) {
                auto pair = std::minmax(matched[i]->rule_id, matched[j]->rule_id);
                out.conflicts.emplace_back(pair.first, pair.second);
            }
        }
    }
    std::sort(out.conflicts.begin(), out.conflicts.end());
    return out;
}

double rule_coverage_rate(const RuleSet& ruleset, std::span<const TaskInstance> corpus) {
    if (corpus.empty()) throw EmptyCorpus("rule_coverage_rate: empty corpus");
    size_t covered = 0;
    for (const TaskInstance& t : corpus) {
        for (const Rule& r : ruleset.rules) {
            if (guard_matches(r, t)) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered) / static_cast<double>(corpus.size());
}

double rule_consistency_index(const RuleSet& ruleset, std::span<const TaskInstance> corpus) {
    if (corpus.empty()) throw EmptyCorpus("rule_consistency_index: empty corpus");
    std::set<std::pair<std::string, std::string>> co_matched;
    std::set<std::pair<std::string, std::string>> conflicting;
    std::vector<const Rule*> hits;
    for (const TaskInstance& t : corpus) {
        hits.clear();
        for (const Rule& r : ruleset.rules) {
            if (guard_matches(r, t)) hits.push_back(&r);
        }
        for (size_t i = 0; i < hits.size(); ++i) {
            for (size_t j = i + 1; j < hits.size(); ++j) {
                auto pair = std::minmax(hits[i]->rule_id, hits[j]->rule_id);
                co_matched.insert(pair);
                if (actions_conflict(hits[i]->action, hits[j]->action)) {
                    conflicting.insert(std::move(pair));
                }
            }
        }
    }
    if (co_matched.empty()) return 1.0;
    return 1.0 - static_cast<double>(conflicting.size()) / static_cast<double>(co_matched.size());
}

std::string rule_canonical_hash(const Rule& rule) {
    json guard = json::array();
    for (const GuardAtom& a : rule.guard) {
        guard.push_back({{"lhs", a.lhs}, {"op", to_string(a.op)}, {"rhs", a.rhs}});
    }
    const json canonical = {{"rule_id", rule.rule_id},
                            {"version", rule.version},
                            {"priority", rule.priority},
                            {"guard", guard},
                            {"action", action_to_string(rule.action)}};
    return sha256_hex(canonical.dump());
}

double update_traceability_coefficient(const RuleSet& ruleset) {
    const auto [complete, total] = update_traceability_counts(ruleset);
    if (total == 0) return 1.0;
    return static_cast<double>(complete) / static_cast<double>(total);
}

std::pair<int64_t, int64_t> update_traceability_counts(const RuleSet& ruleset) {
    if (ruleset.update_log.empty()) return {0, 0};

    // Reconstruct each rule's update chain in version order; update k must
    // link to update k-1's new_rule_hash (zero digest for the first).
    std::map<std::string, std::vector<const RuleUpdate*>> by_rule;
    for (const RuleUpdate& u : ruleset.update_log) by_rule[u.rule_id].push_back(&u);
    for (auto& [id, ups] : by_rule) {
        std::sort(ups.begin(), ups.end(), [](const RuleUpdate* a, const RuleUpdate* b) {
            return a->new_version < b->new_version;
        });
    }
    std::map<std::string, std::string> active_hash;
    for (const Rule& r : ruleset.rules) active_hash[r.rule_id] = rule_canonical_hash(r);
    std::map<std::string, int> active_version;
    for (const Rule& r : ruleset.rules) active_version[r.rule_id] = r.version;

    int64_t complete = 0;
    for (const auto& [id, ups] : by_rule) {
        std::string expect_prior = zero_digest();
        for (const RuleUpdate* u : ups) {
            bool ok = !u->author.empty() && u->timestamp.has_value() && !u->rationale.empty();
            ok = ok && is_digest_hex(u->prior_version_hash) && is_digest_hex(u->new_rule_hash);
            ok = ok && u->prior_version_hash == expect_prior;
            // The head of the chain must describe the active rule exactly.
            if (ok && u == ups.back()) {
                auto av = active_version.find(id);
                if (av != active_version.end() && av->second == u->new_version) {
                    ok = u->new_rule_hash == active_hash[id];
                }
            }
            if (ok) ++complete;
            expect_prior = u->new_rule_hash;
        }
    }
    return {complete, static_cast<int64_t>(ruleset.update_log.size())};
}

} // namespace trace
