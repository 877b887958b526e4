#pragma once

#include "trace/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trace {

// Restricted declarative condition language for L1 guards: a rule guard is a
// conjunction of comparisons and set-membership tests over named features,
// risk_class, and task_type. No learned or stochastic element anywhere.
enum class CompareOp { eq, ne, lt, le, gt, ge, in_set };

const char* to_string(CompareOp op);
CompareOp compare_op_from_string(const std::string& s);

struct GuardAtom {
    std::string lhs;  // feature name, or the reserved keys "risk_class" / "task_type"
    CompareOp op = CompareOp::eq;
    json rhs;         // number, string, or array of either (for in_set)
};

enum class RuleActionKind { allow, deny, mandate_escalation, route };

struct RuleAction {
    RuleActionKind kind = RuleActionKind::allow;
    std::string route_target;  // component_id, route only

    bool operator==(const RuleAction&) const = default;
};

const char* to_string(RuleActionKind k);
std::string action_to_string(const RuleAction& a);

struct Rule {
    std::string rule_id;
    int version = 1;
    std::vector<GuardAtom> guard;  // empty conjunction matches every task
    RuleAction action;
    int priority = 0;  // higher wins; ties broken by rule_id lexical order
};

struct RuleUpdate {
    std::string rule_id;
    int new_version = 1;
    std::string author;
    std::optional<int64_t> timestamp;
    std::string rationale;
    std::string prior_version_hash;  // zero digest for newly introduced rules
    std::string new_rule_hash;       // digest of the rule as of new_version
};

struct RuleSet {
    std::vector<Rule> rules;  // active rules, at most one version per rule_id
    std::vector<RuleUpdate> update_log;
};

struct RuleOutcome {
    // All matched rules as (rule_id, action), ordered by (priority desc,
    // rule_id asc) so the result never depends on ruleset storage order.
    std::vector<std::pair<std::string, RuleAction>> matched;
    std::optional<RuleAction> mandated_action;
    // Unordered matched pairs with contradictory actions (allow vs deny, or
    // distinct route targets), each pair id-sorted, list sorted.
    std::vector<std::pair<std::string, std::string>> conflicts;
};

// Total, side-effect-free guard evaluation: a missing feature or a type
// mismatch makes the atom false, never an error.
bool guard_matches(const Rule& rule, const TaskInstance& task);

RuleOutcome evaluate_rules(const RuleSet& ruleset, const TaskInstance& task);

// Fraction of corpus tasks matched by at least one rule.
double rule_coverage_rate(const RuleSet& ruleset, std::span<const TaskInstance> corpus);

// 1 - (conflicting co-matched pairs / co-matched pairs), witnessed on the
// corpus; 1.0 when no pair ever co-matches.
double rule_consistency_index(const RuleSet& ruleset, std::span<const TaskInstance> corpus);

// Fraction of log entries carrying author, timestamp, nonempty rationale and
// a verifying prior_version_hash; 1.0 for an empty log.
double update_traceability_coefficient(const RuleSet& ruleset);

// (complete entries, total entries) behind the coefficient.
std::pair<int64_t, int64_t> update_traceability_counts(const RuleSet& ruleset);

// Digest of a rule's canonical serialized form, used by the update log.
std::string rule_canonical_hash(const Rule& rule);

} // namespace trace
