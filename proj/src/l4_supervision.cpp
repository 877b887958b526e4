#include "trace/l4_supervision.hpp"

#include "trace/errors.hpp"

namespace trace {

const char* to_string(ReviewAction a) {
    switch (a) {
        case ReviewAction::uphold: return "uphold";
        case ReviewAction::override: return "override";
        case ReviewAction::veto: return "veto";
    }
    return "uphold";
}

namespace {

std::string pick_wrong_label(std::span<const std::string> alphabet, const std::string& truth,
                             uint64_t pick) {
    std::vector<const std::string*> others;
    for (const std::string& l : alphabet) {
        if (l != truth) others.push_back(&l);
    }
    if (others.empty()) return truth;
    return *others[pick % others.size()];
}

} // namespace

ReviewOutcome adjudicate(const AdjudicatorModel& model, const TaskInstance& task,
                         const std::optional<Verdict>& pre_verdict,
                         const std::optional<EscalationReason>& escalated_via,
                         std::span<const std::string> alphabet, RngStream& rng) {
    if (!escalated_via) {
        throw NotEscalated("adjudicate: task " + task.task_id +
                           " did not arrive via an L3 escalate decision");
    }
    if (!task.ground_truth) {
        throw NoGroundTruth("adjudicate: task " + task.task_id + " carries no ground truth");
    }
    const std::string& truth = *task.ground_truth;

    ReviewOutcome out;
    out.task_id = task.task_id;
    out.cost = model.review_cost;
    out.warranted = !pre_verdict || pre_verdict->decision != truth;

    // Fixed draw order regardless of branch taken.
    const bool rules_correctly = rng.bernoulli(model.competence);
    const uint64_t pick = rng.next_u64();

    if (!pre_verdict) {
        if (model.veto_enabled) {
            out.action = ReviewAction::veto;
            return out;
        }
        out.action = ReviewAction::override;
        out.new_decision = rules_correctly ? truth : pick_wrong_label(alphabet, truth, pick);
        return out;
    }

    const bool verdict_correct = pre_verdict->decision == truth;
    if (rules_correctly) {
        if (verdict_correct) {
            out.action = ReviewAction::uphold;
        } else {
            out.action = ReviewAction::override;
            out.new_decision = truth;
        }
    } else {
        if (verdict_correct) {
            out.action = ReviewAction::override;
            out.new_decision = pick_wrong_label(alphabet, truth, pick);
        } else {
            out.action = ReviewAction::uphold;
        }
    }
    return out;
}

double review_burden_index(int64_t n_escalated, int64_t n_total) {
    if (n_total < 1) throw EmptyRun("review_burden_index: empty run");
    return static_cast<double>(n_escalated) / static_cast<double>(n_total);
}

double override_rate(std::span<const ReviewOutcome> reviews) {
    if (reviews.empty()) return 0.0;
    size_t overrides = 0;
    for (const ReviewOutcome& r : reviews) {
        if (r.action == ReviewAction::override) ++overrides;
    }
    return static_cast<double>(overrides) / static_cast<double>(reviews.size());
}

double escalation_snr(std::span<const ReviewOutcome> reviews) {
    size_t warranted = 0;
    size_t unwarranted = 0;
    for (const ReviewOutcome& r : reviews) {
        if (r.warranted) {
            ++warranted;
        } else {
            ++unwarranted;
        }
    }
    return static_cast<double>(warranted) /
           static_cast<double>(std::max<size_t>(1, unwarranted));
}

} // namespace trace
