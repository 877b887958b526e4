#include "trace/l3_policy.hpp"

#include "trace/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trace {

const char* to_string(InvocationPlan::Ordering o) {
    switch (o) {
        case InvocationPlan::Ordering::as_listed: return "as_listed";
        case InvocationPlan::Ordering::descending_capability: return "descending_capability";
        case InvocationPlan::Ordering::ascending_capability: return "ascending_capability";
    }
    return "as_listed";
}

InvocationPlan::Ordering plan_ordering_from_string(const std::string& s) {
    if (s == "as_listed") return InvocationPlan::Ordering::as_listed;
    if (s == "descending_capability") return InvocationPlan::Ordering::descending_capability;
    if (s == "ascending_capability") return InvocationPlan::Ordering::ascending_capability;
    throw ConfigInvalid("unknown ordering_mode: " + s);
}

const char* to_string(Phase p) {
    switch (p) {
        case Phase::ingesting: return "ingesting";
        case Phase::inferring: return "inferring";
        case Phase::escalated: return "escalated";
        case Phase::finalized: return "finalized";
    }
    return "ingesting";
}

const char* to_string(EscalationReason r) {
    switch (r) {
        case EscalationReason::joint_risk_confidence: return "joint_risk_confidence";
        case EscalationReason::inconsistency: return "inconsistency";
        case EscalationReason::budget_exhausted: return "budget_exhausted";
        case EscalationReason::l1_mandated: return "l1_mandated";
    }
    return "l1_mandated";
}

const char* to_string(PolicyDecision::Kind k) {
    switch (k) {
        case PolicyDecision::Kind::invoke: return "invoke";
        case PolicyDecision::Kind::reinvoke: return "reinvoke";
        case PolicyDecision::Kind::escalate: return "escalate";
        case PolicyDecision::Kind::finalize: return "finalize";
    }
    return "invoke";
}

PolicyState record_verdict(PolicyState state, const std::string& component_id,
                           const Verdict& verdict) {
    const bool agrees = !state.history.empty() &&
                        state.history.back().second.decision == verdict.decision;
    state.history.emplace_back(component_id, verdict);
    state.accumulated_cost += verdict.cost;
    if (agrees) {
        state.accumulated_confidence =
            1.0 - (1.0 - state.accumulated_confidence) * (1.0 - verdict.confidence);
        state.agreeing_run += 1;
    } else {
        state.accumulated_confidence = verdict.confidence;
        state.agreeing_run = 1;
    }
    if (state.phase == Phase::ingesting) state.phase = Phase::inferring;
    return state;
}

double detect_inconsistency(std::span<const Verdict> verdicts) {
    if (verdicts.size() < 2) {
        throw TooFewVerdicts("detect_inconsistency: need at least 2 verdicts");
    }
    std::map<std::string, size_t> counts;
    for (const Verdict& v : verdicts) ++counts[v.decision];
    size_t modal = 0;
    for (const auto& [label, n] : counts) modal = std::max(modal, n);
    return 1.0 - static_cast<double>(modal) / static_cast<double>(verdicts.size());
}

namespace {

std::optional<RuleActionKind> l1_stance(const RuleOutcome& outcome) {
    if (!outcome.mandated_action) return std::nullopt;
    const RuleActionKind k = outcome.mandated_action->kind;
    if (k == RuleActionKind::allow || k == RuleActionKind::deny) return k;
    return std::nullopt;
}

// "next-or-alternative": the next unused plan step if one remains, otherwise
// the first fleet component that differs from the most recent one.
std::string reinvocation_target(const PlanContext& plan, const PolicyState& state) {
    if (state.next_step < plan.steps.size()) return plan.steps[state.next_step];
    const std::string& latest = state.history.empty() ? std::string() : state.history.back().first;
    for (const std::string& c : plan.fleet) {
        if (c != latest) return c;
    }
    return latest.empty() && !plan.steps.empty() ? plan.steps.front() : latest;
}

} // namespace

std::pair<PolicyDecision, PolicyState> step(const PlanContext& plan,
                                            const EscalationTriggerSpec& trigger,
                                            const RuleOutcome& l1_outcome,
                                            const PolicyState& state) {
    if (state.phase != Phase::ingesting && state.phase != Phase::inferring) {
        throw PhaseViolation(std::string("step called in phase ") + to_string(state.phase) +
                             " (task " + state.task_id + ")");
    }
    PolicyState next = state;
    PolicyDecision d;

    // (1) The rule core outranks everything.
    if (l1_outcome.mandated_action &&
        l1_outcome.mandated_action->kind == RuleActionKind::mandate_escalation) {
        d.kind = PolicyDecision::Kind::escalate;
        d.reason = EscalationReason::l1_mandated;
        d.detail = {{"trigger", "l1_mandated"}};
        next.phase = Phase::escalated;
        return {d, next};
    }

    // (2) Nothing has been invoked yet.
    if (state.history.empty()) {
        d.kind = PolicyDecision::Kind::invoke;
        d.component_id = plan.steps.at(0);
        d.detail = {{"step_index", 0}};
        next.next_step = 1;
        return {d, next};
    }

    const Verdict& latest = state.history.back().second;
    bool disagrees_with_prior = false;
    for (size_t i = 0; i + 1 < state.history.size(); ++i) {
        if (state.history[i].second.decision != latest.decision) {
            disagrees_with_prior = true;
            break;
        }
    }
    double inconsistency = 0.0;
    if (state.history.size() >= 2) {
        std::vector<Verdict> verdicts;
        verdicts.reserve(state.history.size());
        for (const auto& [id, v] : state.history) verdicts.push_back(v);
        inconsistency = detect_inconsistency(verdicts);
    }
    const bool open_disagreement =
        disagrees_with_prior && inconsistency >= trigger.inconsistency_threshold;

    // (3) Inconsistency: re-invoke while the budget lasts, escalate when the
    // budget gate fails. A policy configured with no budget at all escalates
    // on the inconsistency itself.
    if (open_disagreement) {
        if (state.budget_remaining > 0) {
            d.kind = PolicyDecision::Kind::reinvoke;
            d.component_id = reinvocation_target(plan, state);
            d.expanded_context = true;
            d.detail = {{"inconsistency", inconsistency},
                        {"threshold", trigger.inconsistency_threshold}};
            next.budget_remaining -= 1;
            if (state.next_step < plan.steps.size()) next.next_step += 1;
            return {d, next};
        }
        d.kind = PolicyDecision::Kind::escalate;
        d.reason = trigger.reinvocation_budget > 0 ? EscalationReason::budget_exhausted
                                                   : EscalationReason::inconsistency;
        d.detail = {{"inconsistency", inconsistency},
                    {"threshold", trigger.inconsistency_threshold},
                    {"budget_remaining", 0}};
        next.phase = Phase::escalated;
        return {d, next};
    }

    // (4) Joint trigger: high risk and high confidence, with a contradiction
    // witness against the rule core's stance or a prior verdict.
    if (state.risk_class >= trigger.risk_threshold &&
        state.accumulated_confidence >= trigger.confidence_threshold) {
        bool contradicts = disagrees_with_prior;
        if (!contradicts) {
            const auto stance = l1_stance(l1_outcome);
            const auto pol = plan.polarity.find(latest.decision);
            contradicts = stance && pol != plan.polarity.end() && *stance != pol->second;
        }
        if (contradicts) {
            d.kind = PolicyDecision::Kind::escalate;
            d.reason = EscalationReason::joint_risk_confidence;
            d.detail = {{"risk_class", to_string(state.risk_class)},
                        {"risk_threshold", to_string(trigger.risk_threshold)},
                        {"confidence", state.accumulated_confidence},
                        {"confidence_threshold", trigger.confidence_threshold}};
            next.phase = Phase::escalated;
            return {d, next};
        }
    }

    // (5) Confident, uncontradicted verdict finalizes.
    if (state.accumulated_confidence >= trigger.confidence_threshold && !open_disagreement) {
        d.kind = PolicyDecision::Kind::finalize;
        d.final_verdict = latest;
        d.final_verdict.confidence = state.accumulated_confidence;
        d.detail = {{"confidence", state.accumulated_confidence},
                    {"confidence_threshold", trigger.confidence_threshold}};
        next.phase = Phase::finalized;
        return {d, next};
    }

    // (6) Keep working the plan; spend leftover budget on re-invocations;
    // out of both, hand off.
    if (state.next_step < plan.steps.size()) {
        d.kind = PolicyDecision::Kind::invoke;
        d.component_id = plan.steps[state.next_step];
        d.detail = {{"step_index", state.next_step}};
        next.next_step += 1;
        return {d, next};
    }
    if (state.budget_remaining > 0) {
        d.kind = PolicyDecision::Kind::reinvoke;
        d.component_id = reinvocation_target(plan, state);
        d.expanded_context = true;
        d.detail = {{"confidence", state.accumulated_confidence},
                    {"confidence_threshold", trigger.confidence_threshold}};
        next.budget_remaining -= 1;
        return {d, next};
    }
    d.kind = PolicyDecision::Kind::escalate;
    d.reason = EscalationReason::budget_exhausted;
    d.detail = {{"confidence", state.accumulated_confidence},
                {"confidence_threshold", trigger.confidence_threshold},
                {"budget_remaining", 0}};
    next.phase = Phase::escalated;
    return {d, next};
}

double scalarize_cost(const CostVector& c, const CostWeights& w) {
    return w.latency * c.latency + w.compute * c.compute + w.monetary * c.monetary;
}

double tier_cost_coefficient(const CostVector& executed_path_cost,
                             const CostVector& minimal_path_cost, const CostWeights& weights) {
    const double minimal = scalarize_cost(minimal_path_cost, weights);
    if (minimal <= 0.0) {
        throw ZeroMinimalCost("tier_cost_coefficient: minimal path cost scalarizes to <= 0");
    }
    return scalarize_cost(executed_path_cost, weights) / minimal;
}

double escalation_precision(std::span<const EscalationCase> escalations) {
    if (escalations.empty()) return 1.0;
    size_t warranted = 0;
    for (const EscalationCase& e : escalations) {
        if (!e.pre_escalation_verdict ||
            e.pre_escalation_verdict->decision != e.ground_truth) {
            ++warranted;
        }
    }
    return static_cast<double>(warranted) / static_cast<double>(escalations.size());
}

double false_positive_attenuation(std::span<const AttenuationCandidate> candidates) {
    size_t spurious = 0;
    size_t suppressed = 0;
    for (const AttenuationCandidate& c : candidates) {
        if (!c.was_spurious) continue;
        ++spurious;
        if (c.suppressed_by_reinvocation) ++suppressed;
    }
    if (spurious == 0) return 1.0;
    return static_cast<double>(suppressed) / static_cast<double>(spurious);
}

const char* to_string(AutonomyLevel l) {
    switch (l) {
        case AutonomyLevel::advise_only: return "advise_only";
        case AutonomyLevel::act_with_review: return "act_with_review";
        case AutonomyLevel::act_autonomously: return "act_autonomously";
    }
    return "advise_only";
}

AutonomyLevel autonomy_level_from_string(const std::string& s) {
    if (s == "advise_only") return AutonomyLevel::advise_only;
    if (s == "act_with_review") return AutonomyLevel::act_with_review;
    if (s == "act_autonomously") return AutonomyLevel::act_autonomously;
    throw ConfigInvalid("unknown autonomy level: " + s);
}

std::pair<AutonomyLedger, std::optional<AutonomyChange>> update_autonomy(
    AutonomyLedger ledger, const std::string& task_type, const AutonomyWindowMetrics& window) {
    const AutonomyThresholds& t = ledger.thresholds;
    if (window.n_tasks < t.window_min) {
        throw InsufficientWindow("update_autonomy: window of " + std::to_string(window.n_tasks) +
                                 " tasks is below the minimum of " + std::to_string(t.window_min));
    }
    auto [it, inserted] = ledger.levels.try_emplace(task_type, AutonomyLevel::advise_only);
    const AutonomyLevel current = it->second;
    ledger.supporting_window[task_type] = window;

    // Demotion is immediate when any threshold is violated by a factor of
    // two; promotion requires every threshold cleared strictly.
    const bool demote = window.override_rate >= 2.0 * t.max_override_rate ||
                        window.calibration_error >= 2.0 * t.max_calibration_error ||
                        window.escalation_precision <= t.min_escalation_precision / 2.0;
    const bool promote = window.override_rate < t.max_override_rate &&
                         window.calibration_error < t.max_calibration_error &&
                         window.escalation_precision > t.min_escalation_precision;

    AutonomyLevel next = current;
    if (demote && current > AutonomyLevel::advise_only) {
        next = static_cast<AutonomyLevel>(static_cast<int>(current) - 1);
    } else if (!demote && promote && current < AutonomyLevel::act_autonomously) {
        next = static_cast<AutonomyLevel>(static_cast<int>(current) + 1);
    }
    if (next == current) return {std::move(ledger), std::nullopt};

    it->second = next;
    AutonomyChange change;
    change.task_type = task_type;
    change.old_level = current;
    change.new_level = next;
    change.justification = {{"escalation_precision", window.escalation_precision},
                            {"override_rate", window.override_rate},
                            {"calibration_error", window.calibration_error},
                            {"n_tasks", window.n_tasks}};
    ledger.history.push_back(change);
    return {std::move(ledger), change};
}

} // namespace trace
