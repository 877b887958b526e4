#pragma once

#include "trace/l3_policy.hpp"
#include "trace/rng.hpp"
#include "trace/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trace {

// Simulated human adjudicator: rules per ground truth with probability
// `competence`, never interactively.
struct AdjudicatorModel {
    double competence = 1.0;
    CostVector review_cost;
    bool veto_enabled = false;
};

enum class ReviewAction { uphold, override, veto };
const char* to_string(ReviewAction a);

struct ReviewOutcome {
    std::string task_id;
    ReviewAction action = ReviewAction::uphold;
    std::optional<std::string> new_decision;  // override only, from the task's alphabet
    bool warranted = false;  // the pre-escalation verdict was wrong (simulator-derived)
    CostVector cost;
};

// Adjudicates a case that L3 escalated. `escalated_via` carries the policy's
// escalation reason; a case that never went through an L3 escalate decision
// is rejected with NotEscalated. When the escalation fired before any
// invocation there is no verdict to review: a veto-enabled adjudicator
// blocks the automated path outright, otherwise the ruling is a fresh
// decision (correct with probability competence).
ReviewOutcome adjudicate(const AdjudicatorModel& model, const TaskInstance& task,
                         const std::optional<Verdict>& pre_verdict,
                         const std::optional<EscalationReason>& escalated_via,
                         std::span<const std::string> alphabet, RngStream& rng);

// n_escalated / n_total. Throws EmptyRun when n_total < 1.
double review_burden_index(int64_t n_escalated, int64_t n_total);

// overrides / |reviews|; 0.0 for an empty list.
double override_rate(std::span<const ReviewOutcome> reviews);

// warranted / max(1, unwarranted).
double escalation_snr(std::span<const ReviewOutcome> reviews);

} // namespace trace
