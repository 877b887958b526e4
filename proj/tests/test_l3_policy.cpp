#include "trace/l3_policy.hpp"

#include "trace/errors.hpp"

#include <doctest.h>

using namespace trace;

namespace {

PlanContext two_step_plan() {
    PlanContext p;
    p.task_type = "triage";
    p.steps = {"a", "b"};
    p.fleet = {"a", "b", "c"};
    p.polarity = {{"approve", RuleActionKind::allow}, {"deny", RuleActionKind::deny}};
    return p;
}

EscalationTriggerSpec default_trigger() {
    EscalationTriggerSpec t;
    t.risk_threshold = RiskClass::high;
    t.confidence_threshold = 0.9;
    t.inconsistency_threshold = 0.5;
    t.reinvocation_budget = 1;
    return t;
}

Verdict verdict(const std::string& decision, double confidence) {
    Verdict v;
    v.decision = decision;
    v.confidence = confidence;
    v.source = "L2a:x";
    v.cost = {1.0, 1.0, 0.0};
    return v;
}

PolicyState fresh_state(int budget = 1, RiskClass risk = RiskClass::low) {
    PolicyState s;
    s.task_id = "t";
    s.budget_remaining = budget;
    s.risk_class = risk;
    return s;
}

RuleOutcome mandate_outcome() {
    RuleOutcome o;
    o.mandated_action = RuleAction{RuleActionKind::mandate_escalation, ""};
    return o;
}

} // namespace

TEST_CASE("accumulated confidence follows noisy-OR over agreeing runs") {
    PolicyState s = fresh_state();
    s = record_verdict(std::move(s), "a", verdict("approve", 0.8));
    CHECK(s.accumulated_confidence == doctest::Approx(0.8));
    CHECK(s.phase == Phase::inferring);
    s = record_verdict(std::move(s), "b", verdict("approve", 0.5));
    CHECK(s.accumulated_confidence == doctest::Approx(1.0 - 0.2 * 0.5));
    SUBCASE("disagreement resets to the latest confidence") {
        s = record_verdict(std::move(s), "c", verdict("deny", 0.6));
        CHECK(s.accumulated_confidence == doctest::Approx(0.6));
        CHECK(s.agreeing_run == 1);
    }
    SUBCASE("accumulation is monotone while verdicts agree") {
        double last = s.accumulated_confidence;
        for (int i = 0; i < 5; ++i) {
            s = record_verdict(std::move(s), "a", verdict("approve", 0.3));
            CHECK(s.accumulated_confidence >= last);
            last = s.accumulated_confidence;
            CHECK(last <= 1.0);
        }
    }
}

TEST_CASE("happy path: one confident verdict finalizes") {
    PolicyState s = fresh_state();
    auto [d0, s0] = step(two_step_plan(), default_trigger(), RuleOutcome{}, s);
    CHECK(d0.kind == PolicyDecision::Kind::invoke);
    CHECK(d0.component_id == "a");
    s0 = record_verdict(std::move(s0), "a", verdict("approve", 0.99));
    auto [d1, s1] = step(two_step_plan(), default_trigger(), RuleOutcome{}, s0);
    CHECK(d1.kind == PolicyDecision::Kind::finalize);
    CHECK(d1.final_verdict.decision == "approve");
    CHECK(d1.final_verdict.confidence == doctest::Approx(0.99));
    CHECK(s1.phase == Phase::finalized);
}

TEST_CASE("an L1 mandate escalates before anything else") {
    PolicyState s = fresh_state();
    s = record_verdict(std::move(s), "a", verdict("approve", 0.99));
    auto [d, s1] = step(two_step_plan(), default_trigger(), mandate_outcome(), s);
    CHECK(d.kind == PolicyDecision::Kind::escalate);
    CHECK(d.reason == EscalationReason::l1_mandated);
    CHECK(s1.phase == Phase::escalated);
}

TEST_CASE("two-verdict disagreement: reinvoke on budget, escalate without") {
    // Hand-traced transition table for the {approve@0.95, deny@0.9} state.
    PolicyState s = fresh_state(1);
    s = record_verdict(std::move(s), "a", verdict("approve", 0.95));
    s.next_step = 1;
    s = record_verdict(std::move(s), "b", verdict("deny", 0.9));
    REQUIRE(s.accumulated_confidence == doctest::Approx(0.9));  // reset on disagreement

    SUBCASE("budget 1: expanded-context re-invocation, budget decrements") {
        auto [d, s1] = step(two_step_plan(), default_trigger(), RuleOutcome{}, s);
        CHECK(d.kind == PolicyDecision::Kind::reinvoke);
        CHECK(d.expanded_context);
        CHECK(d.component_id == "b");  // next unused step
        CHECK(s1.budget_remaining == 0);
    }
    SUBCASE("budget 0 after spending: budget_exhausted escalation") {
        s.budget_remaining = 0;
        auto [d, s1] = step(two_step_plan(), default_trigger(), RuleOutcome{}, s);
        CHECK(d.kind == PolicyDecision::Kind::escalate);
        CHECK(d.reason == EscalationReason::budget_exhausted);
        CHECK(s1.phase == Phase::escalated);
    }
    SUBCASE("a policy with no budget at all escalates on the inconsistency itself") {
        EscalationTriggerSpec t = default_trigger();
        t.reinvocation_budget = 0;
        s.budget_remaining = 0;
        auto [d, s1] = step(two_step_plan(), t, RuleOutcome{}, s);
        CHECK(d.kind == PolicyDecision::Kind::escalate);
        CHECK(d.reason == EscalationReason::inconsistency);
    }
    SUBCASE("steps exhausted: re-invocation falls back to an alternative component") {
        s.next_step = 2;
        auto [d, s1] = step(two_step_plan(), default_trigger(), RuleOutcome{}, s);
        CHECK(d.kind == PolicyDecision::Kind::reinvoke);
        CHECK(d.component_id == "a");  // first fleet member differing from latest ("b")
    }
}

TEST_CASE("joint trigger needs risk, confidence, and a contradiction witness") {
    EscalationTriggerSpec t = default_trigger();
    t.confidence_threshold = 0.75;
    PlanContext plan = two_step_plan();

    PolicyState s = fresh_state(1, RiskClass::high);
    s = record_verdict(std::move(s), "a", verdict("approve", 0.8));
    s.next_step = 1;

    SUBCASE("L1 deny stance against a confident allow-polarity verdict") {
        RuleOutcome l1;
        l1.mandated_action = RuleAction{RuleActionKind::deny, ""};
        auto [d, s1] = step(plan, t, l1, s);
        CHECK(d.kind == PolicyDecision::Kind::escalate);
        CHECK(d.reason == EscalationReason::joint_risk_confidence);
    }
    SUBCASE("no contradiction: the confident verdict finalizes instead") {
        auto [d, s1] = step(plan, t, RuleOutcome{}, s);
        CHECK(d.kind == PolicyDecision::Kind::finalize);
    }
    SUBCASE("below the risk threshold nothing fires") {
        PolicyState low = fresh_state(1, RiskClass::medium);
        low = record_verdict(std::move(low), "a", verdict("approve", 0.8));
        low.next_step = 1;
        RuleOutcome l1;
        l1.mandated_action = RuleAction{RuleActionKind::deny, ""};
        auto [d, s1] = step(plan, t, l1, low);
        CHECK(d.kind == PolicyDecision::Kind::finalize);
    }
    SUBCASE("a prior contradicting verdict is also a witness") {
        PolicyState s2 = fresh_state(1, RiskClass::high);
        s2 = record_verdict(std::move(s2), "a", verdict("deny", 0.6));
        s2.next_step = 1;
        s2 = record_verdict(std::move(s2), "b", verdict("approve", 0.8));
        s2.next_step = 2;
        s2 = record_verdict(std::move(s2), "c", verdict("approve", 0.8));
        // inconsistency 1/3 < 0.5, acc = 1-(0.2*0.2) = 0.96 >= 0.75
        auto [d, s3] = step(plan, t, RuleOutcome{}, s2);
        CHECK(d.kind == PolicyDecision::Kind::escalate);
        CHECK(d.reason == EscalationReason::joint_risk_confidence);
    }
}

TEST_CASE("plan continuation and terminal budget exhaustion") {
    EscalationTriggerSpec t = default_trigger();
    PolicyState s = fresh_state(0);
    s = record_verdict(std::move(s), "a", verdict("approve", 0.5));
    s.next_step = 1;
    auto [d, s1] = step(two_step_plan(), t, RuleOutcome{}, s);
    CHECK(d.kind == PolicyDecision::Kind::invoke);
    CHECK(d.component_id == "b");

    s1 = record_verdict(std::move(s1), "b", verdict("approve", 0.5));
    // acc = 0.75 < 0.9, no steps left, no budget -> escalate
    auto [d2, s2] = step(two_step_plan(), t, RuleOutcome{}, s1);
    CHECK(d2.kind == PolicyDecision::Kind::escalate);
    CHECK(d2.reason == EscalationReason::budget_exhausted);
    CHECK(s2.budget_remaining == 0);
}

TEST_CASE("step rejects terminal phases") {
    PolicyState s = fresh_state();
    s.phase = Phase::finalized;
    CHECK_THROWS_AS(step(two_step_plan(), default_trigger(), RuleOutcome{}, s), PhaseViolation);
    s.phase = Phase::escalated;
    CHECK_THROWS_AS(step(two_step_plan(), default_trigger(), RuleOutcome{}, s), PhaseViolation);
}

TEST_CASE("step is a pure transition function") {
    PolicyState s = fresh_state(1, RiskClass::high);
    s = record_verdict(std::move(s), "a", verdict("approve", 0.95));
    s.next_step = 1;
    s = record_verdict(std::move(s), "b", verdict("deny", 0.9));
    const auto first = step(two_step_plan(), default_trigger(), RuleOutcome{}, s);
    const auto second = step(two_step_plan(), default_trigger(), RuleOutcome{}, s);
    CHECK(first.first.kind == second.first.kind);
    CHECK(first.first.component_id == second.first.component_id);
    CHECK(first.second.budget_remaining == second.second.budget_remaining);
    CHECK(s.budget_remaining == 1);  // input untouched
}

TEST_CASE("inconsistency is the modal complement") {
    auto verdicts = [](std::initializer_list<const char*> labels) {
        std::vector<Verdict> out;
        for (const char* l : labels) out.push_back(verdict(l, 0.5));
        return out;
    };
    CHECK(detect_inconsistency(verdicts({"a", "a"})) == 0.0);
    CHECK(detect_inconsistency(verdicts({"a", "b"})) == doctest::Approx(0.5));
    CHECK(detect_inconsistency(verdicts({"a", "a", "b"})) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(detect_inconsistency(verdicts({"a"})), TooFewVerdicts);
}

TEST_CASE("tier cost coefficient") {
    const CostWeights w{1.0, 1.0, 1.0};
    CHECK(tier_cost_coefficient({5, 1, 1}, {5, 1, 1}, w) == doctest::Approx(1.0));
    CHECK(tier_cost_coefficient({15, 3, 3}, {5, 1, 1}, w) == doctest::Approx(3.0));
    CHECK(tier_cost_coefficient({10, 2, 1}, {5, 1, 1}, CostWeights{1.0, 1.0, 0.0}) ==
          doctest::Approx(2.0));
    CHECK_THROWS_AS(tier_cost_coefficient({1, 1, 1}, {0, 0, 0}, w), ZeroMinimalCost);
}

TEST_CASE("escalation precision counts caught errors") {
    auto esc = [](const char* decision, const char* truth) {
        EscalationCase e;
        e.pre_escalation_verdict = verdict(decision, 0.5);
        e.ground_truth = truth;
        return e;
    };
    std::vector<EscalationCase> all_wrong = {esc("a", "b"), esc("a", "c")};
    CHECK(escalation_precision(all_wrong) == 1.0);
    std::vector<EscalationCase> none_wrong = {esc("a", "a"), esc("b", "b")};
    CHECK(escalation_precision(none_wrong) == 0.0);
    std::vector<EscalationCase> mixed = {esc("a", "b"), esc("a", "b"), esc("a", "b"),
                                         esc("a", "a"), esc("b", "b")};
    CHECK(escalation_precision(mixed) == doctest::Approx(0.6));
    CHECK(escalation_precision({}) == 1.0);

    EscalationCase no_verdict;
    no_verdict.ground_truth = "a";
    CHECK(escalation_precision(std::vector<EscalationCase>{no_verdict}) == 1.0);
}

TEST_CASE("false positive attenuation") {
    CHECK(false_positive_attenuation({}) == 1.0);
    std::vector<AttenuationCandidate> spurious = {{true, true}, {true, true}, {true, true},
                                                  {true, false}};
    CHECK(false_positive_attenuation(spurious) == doctest::Approx(0.75));
    std::vector<AttenuationCandidate> all_escalated = {{true, false}, {true, false}};
    CHECK(false_positive_attenuation(all_escalated) == 0.0);
    std::vector<AttenuationCandidate> no_spurious = {{false, false}, {false, true}};
    CHECK(false_positive_attenuation(no_spurious) == 1.0);
}

TEST_CASE("autonomy ledger promotion and demotion") {
    AutonomyLedger ledger;
    ledger.levels["triage"] = AutonomyLevel::advise_only;

    SUBCASE("clean window promotes one level") {
        auto [l1, change] = update_autonomy(ledger, "triage", {0.9, 0.01, 0.01, 500});
        REQUIRE(change.has_value());
        CHECK(change->old_level == AutonomyLevel::advise_only);
        CHECK(change->new_level == AutonomyLevel::act_with_review);
        CHECK(l1.levels["triage"] == AutonomyLevel::act_with_review);
        CHECK(l1.history.size() == 1);
    }
    SUBCASE("a 2x violation demotes immediately") {
        ledger.levels["triage"] = AutonomyLevel::act_autonomously;
        auto [l1, change] = update_autonomy(ledger, "triage", {0.9, 0.2, 0.01, 500});
        REQUIRE(change.has_value());
        CHECK(change->new_level == AutonomyLevel::act_with_review);
    }
    SUBCASE("values exactly at the thresholds change nothing") {
        ledger.levels["triage"] = AutonomyLevel::act_with_review;
        auto [l1, change] = update_autonomy(ledger, "triage", {0.8, 0.05, 0.05, 500});
        CHECK(!change.has_value());
        CHECK(l1.levels["triage"] == AutonomyLevel::act_with_review);
    }
    SUBCASE("promotion saturates at full autonomy") {
        ledger.levels["triage"] = AutonomyLevel::act_autonomously;
        auto [l1, change] = update_autonomy(ledger, "triage", {1.0, 0.0, 0.0, 500});
        CHECK(!change.has_value());
    }
    SUBCASE("a short window is rejected") {
        CHECK_THROWS_AS(update_autonomy(ledger, "triage", {1.0, 0.0, 0.0, 50}),
                        InsufficientWindow);
    }
}
