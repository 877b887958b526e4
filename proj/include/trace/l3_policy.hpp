#pragma once

#include "trace/l1_rules.hpp"
#include "trace/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trace {

struct InvocationPlan {
    enum class Ordering { as_listed, descending_capability, ascending_capability };
    std::string task_type;
    std::vector<std::string> steps;  // component ids, nonempty
    Ordering ordering_mode = Ordering::as_listed;
};

const char* to_string(InvocationPlan::Ordering o);
InvocationPlan::Ordering plan_ordering_from_string(const std::string& s);

// A plan made concrete for one task: steps in execution order (after
// capability ordering and any L1 routing), the fleet available for
// re-invocation alternatives, and the decision-label polarity used to judge
// contradictions against an L1 allow/deny stance.
struct PlanContext {
    std::string task_type;
    std::vector<std::string> steps;
    std::vector<std::string> fleet;
    std::map<std::string, RuleActionKind> polarity;  // label -> allow or deny
};

struct EscalationTriggerSpec {
    RiskClass risk_threshold = RiskClass::high;
    double confidence_threshold = 0.9;
    double inconsistency_threshold = 0.5;
    int reinvocation_budget = 0;
};

enum class Phase { ingesting, inferring, escalated, finalized };
const char* to_string(Phase p);

// The stateful L3 record for one task. Value type: step() returns an updated
// copy and never mutates its input.
struct PolicyState {
    std::string task_id;
    std::vector<std::pair<std::string, Verdict>> history;  // (component_id, verdict)
    double accumulated_confidence = 0.0;
    int budget_remaining = 0;
    RiskClass risk_class = RiskClass::low;
    CostVector accumulated_cost;
    Phase phase = Phase::ingesting;
    size_t next_step = 0;      // index of the next unused plan step
    int agreeing_run = 0;      // length of the agreeing suffix of history
};

// Appends a verdict and applies the accumulated-confidence rule: noisy-OR
// over the agreeing suffix, reset to the latest confidence on disagreement.
PolicyState record_verdict(PolicyState state, const std::string& component_id,
                           const Verdict& verdict);

enum class EscalationReason { joint_risk_confidence, inconsistency, budget_exhausted, l1_mandated };
const char* to_string(EscalationReason r);

struct PolicyDecision {
    enum class Kind { invoke, reinvoke, escalate, finalize };
    Kind kind = Kind::invoke;
    std::string component_id;        // invoke / reinvoke
    bool expanded_context = false;   // reinvoke only
    EscalationReason reason = EscalationReason::l1_mandated;  // escalate only
    Verdict final_verdict;           // finalize only
    json detail;                     // trigger values that fired
};

const char* to_string(PolicyDecision::Kind k);

// Deterministic policy transition. Evaluation order: L1 mandate, first
// invocation, inconsistency (re-invoke while budget lasts), the joint
// high-risk/high-confidence trigger with a contradiction witness, confident
// finalization, then plan continuation or budget-exhausted escalation.
// Throws PhaseViolation unless state.phase is ingesting or inferring.
std::pair<PolicyDecision, PolicyState> step(const PlanContext& plan,
                                            const EscalationTriggerSpec& trigger,
                                            const RuleOutcome& l1_outcome,
                                            const PolicyState& state);

// 1 - modal decision share: 0 when unanimous, 0.5 for an even binary split.
double detect_inconsistency(std::span<const Verdict> verdicts);

struct CostWeights {
    double latency = 1.0;
    double compute = 1.0;
    double monetary = 1.0;
};

double scalarize_cost(const CostVector& c, const CostWeights& w);

// scalarize(executed) / scalarize(minimal); >= 1 whenever the executed path
// includes the minimal one. Throws ZeroMinimalCost.
double tier_cost_coefficient(const CostVector& executed_path_cost,
                             const CostVector& minimal_path_cost, const CostWeights& weights);

struct EscalationCase {
    std::optional<Verdict> pre_escalation_verdict;  // absent when L1 mandated before any invocation
    std::string ground_truth;
};

// Fraction of escalations whose hand-off caught a would-be error (missing
// pre-escalation verdict counts as caught). 1.0 for zero escalations.
double escalation_precision(std::span<const EscalationCase> escalations);

struct AttenuationCandidate {
    bool was_spurious = false;              // pre-candidate verdict already equaled ground truth
    bool suppressed_by_reinvocation = false;  // resolved without L4
};

// Fraction of spurious soft-trigger firings suppressed without L4; 1.0 when
// no spurious candidates.
double false_positive_attenuation(std::span<const AttenuationCandidate> candidates);

enum class AutonomyLevel { advise_only = 0, act_with_review = 1, act_autonomously = 2 };
const char* to_string(AutonomyLevel l);
AutonomyLevel autonomy_level_from_string(const std::string& s);

struct AutonomyWindowMetrics {
    double escalation_precision = 1.0;
    double override_rate = 0.0;
    double calibration_error = 0.0;
    int n_tasks = 0;
};

struct AutonomyThresholds {
    double max_override_rate = 0.05;
    double max_calibration_error = 0.05;
    double min_escalation_precision = 0.8;
    int window_min = 100;
};

struct AutonomyChange {
    std::string task_type;
    AutonomyLevel old_level = AutonomyLevel::advise_only;
    AutonomyLevel new_level = AutonomyLevel::advise_only;
    json justification;
};

// Per-task-type action rights, earned (and lost) on rolling window evidence.
struct AutonomyLedger {
    AutonomyThresholds thresholds;
    std::map<std::string, AutonomyLevel> levels;
    std::map<std::string, AutonomyWindowMetrics> supporting_window;
    std::vector<AutonomyChange> history;
};

// Applies the promotion/demotion predicate: promote one level when every
// window metric clears its threshold strictly, demote one level when any
// metric is violated by a factor of two. Throws InsufficientWindow when the
// window holds fewer tasks than the configured minimum. The returned change
// (if any) must be appended to the evidence stream by the caller.
std::pair<AutonomyLedger, std::optional<AutonomyChange>> update_autonomy(
    AutonomyLedger ledger, const std::string& task_type, const AutonomyWindowMetrics& window);

} // namespace trace
