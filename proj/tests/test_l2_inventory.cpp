#include "trace/l2_inventory.hpp"

#include "trace/errors.hpp"

#include <doctest.h>

#include <algorithm>

using namespace trace;

namespace {

ComponentDescriptor make_component(double accuracy, ComponentClass cls = ComponentClass::L2a) {
    ComponentDescriptor c;
    c.component_id = "c1";
    c.component_class = cls;
    c.cost_per_invocation = {10.0, 2.0, 0.1};
    c.capability = accuracy;
    c.sim.accuracy = accuracy;
    c.supported_task_types = {"triage"};
    return c;
}

InvocationRequest make_request(const std::string& truth = "approve") {
    InvocationRequest r;
    r.task.task_id = "t";
    r.task.task_type = "triage";
    r.task.ground_truth = truth;
    r.task.features["x"] = 0.5;
    r.alphabet = {"approve", "deny"};
    return r;
}

} // namespace

TEST_CASE("a perfect component emits the truth at full confidence") {
    const ComponentDescriptor c = make_component(1.0);
    RngStream rng(1, "invoke", 0);
    const Verdict v = invoke(c, make_request(), rng);
    CHECK(v.decision == "approve");
    CHECK(v.confidence == 1.0);
    CHECK(v.source == "L2a:c1");
    CHECK(v.cost.latency == 10.0);
}

TEST_CASE("accuracy zero on a binary alphabet yields the single wrong label") {
    const ComponentDescriptor c = make_component(0.0);
    RngStream rng(1, "invoke", 0);
    CHECK(invoke(c, make_request(), rng).decision == "deny");
}

TEST_CASE("unsupported task types are rejected") {
    const ComponentDescriptor c = make_component(1.0);
    InvocationRequest r = make_request();
    r.task.task_type = "other";
    RngStream rng(1, "invoke", 0);
    CHECK_THROWS_AS(invoke(c, r, rng), UnsupportedTaskType);
}

TEST_CASE("empirical accuracy matches the configured rate") {
    const ComponentDescriptor c = make_component(0.8);
    const InvocationRequest r = make_request();
    int correct = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(42, "mc", i);
        if (invoke(c, r, rng).decision == "approve") ++correct;
    }
    // Binomial: sd ~ 0.004, +-0.02 is a 5-sigma envelope.
    CHECK(static_cast<double>(correct) / n == doctest::Approx(0.8).epsilon(0.025));
}

TEST_CASE("expanded context multiplies the error by context_gain") {
    ComponentDescriptor c = make_component(0.8);
    c.sim.context_gain = 0.5;
    InvocationRequest r = make_request();
    r.attempt = 2;
    r.expanded_context = true;
    int correct = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(7, "gain", i);
        if (invoke(c, r, rng).decision == "approve") ++correct;
    }
    CHECK(static_cast<double>(correct) / n == doctest::Approx(0.9).epsilon(0.01));
}

TEST_CASE("statelessness: the verdict is a pure function of its inputs") {
    const ComponentDescriptor c = make_component(0.7);
    const InvocationRequest r = make_request();
    RngStream a(5, "pure", 3);
    RngStream b(5, "pure", 3);
    const Verdict va = invoke(c, r, a);
    const Verdict vb = invoke(c, r, b);
    CHECK(va.decision == vb.decision);
    CHECK(va.confidence == vb.confidence);
}

TEST_CASE("hallucination overrides with a confident fabricated label") {
    ComponentDescriptor c = make_component(1.0, ComponentClass::L2b);
    c.sim.hallucination_rate = 1.0;
    RngStream rng(9, "halluc", 0);
    const Verdict v = invoke(c, make_request(), rng);
    CHECK(v.decision == "deny");  // fabricated, never the truth
    CHECK(v.confidence >= 0.9);
}

TEST_CASE("hallucination frequency tracks the configured rate") {
    ComponentDescriptor c = make_component(1.0, ComponentClass::L2b);
    c.sim.hallucination_rate = 0.17;
    const InvocationRequest r = make_request();
    int fabricated = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        RngStream rng(11, "halluc-mc", i);
        if (invoke(c, r, rng).decision != "approve") ++fabricated;
    }
    CHECK(static_cast<double>(fabricated) / n == doctest::Approx(0.17).epsilon(0.05));
}

TEST_CASE("ECE handles the textbook cases") {
    SUBCASE("perfectly calibrated certainty") {
        std::vector<std::pair<double, bool>> pairs(100, {1.0, true});
        CHECK(expected_calibration_error(pairs, 10) == 0.0);
    }
    SUBCASE("one bin, fully wrong at 0.9") {
        std::vector<std::pair<double, bool>> pairs(50, {0.9, false});
        CHECK(expected_calibration_error(pairs, 1) == doctest::Approx(0.9));
    }
    SUBCASE("bin accuracy equal to bin confidence") {
        std::vector<std::pair<double, bool>> pairs;
        for (int i = 0; i < 8; ++i) pairs.emplace_back(0.8, true);
        for (int i = 0; i < 2; ++i) pairs.emplace_back(0.8, false);
        CHECK(expected_calibration_error(pairs, 10) == doctest::Approx(0.0));
    }
    SUBCASE("empty input is an error") {
        CHECK_THROWS_AS(expected_calibration_error({}, 10), EmptyInput);
    }
}

TEST_CASE("ECE is permutation invariant and bounded by the max bin gap") {
    std::vector<std::pair<double, bool>> pairs;
    RngStream rng(21, "ece", 0);
    for (int i = 0; i < 500; ++i) {
        pairs.emplace_back(rng.next_double(), rng.bernoulli(0.6));
    }
    const double base = expected_calibration_error(pairs, 10);
    for (int round = 0; round < 10; ++round) {
        for (size_t i = pairs.size(); i > 1; --i) {
            std::swap(pairs[i - 1], pairs[rng.uniform_int(i)]);
        }
        CHECK(expected_calibration_error(pairs, 10) == doctest::Approx(base).epsilon(1e-12));
    }
    CHECK(base <= 1.0);
}

TEST_CASE("simulator calibration soundness: zero shift and noise drive ECE to zero") {
    ComponentDescriptor c = make_component(0.8);
    const InvocationRequest r = make_request();
    std::vector<std::pair<double, bool>> pairs;
    const int n = 50000;
    pairs.reserve(n);
    for (int i = 0; i < n; ++i) {
        RngStream rng(1234, "calib", i);
        const Verdict v = invoke(c, r, rng);
        pairs.emplace_back(v.confidence, v.decision == "approve");
    }
    CHECK(expected_calibration_error(pairs, 10) < 0.02);
}

TEST_CASE("perturbation stability shares the decision noise") {
    SUBCASE("zero magnitude is perfectly stable") {
        const ComponentDescriptor c = make_component(0.6);
        RngStream rng(2, "ips", 0);
        CHECK(input_perturbation_stability(c, make_request(), 0.0, 200, rng) == 1.0);
    }
    SUBCASE("feature-blind components are perfectly stable") {
        const ComponentDescriptor c = make_component(0.5);
        RngStream rng(3, "ips", 0);
        CHECK(input_perturbation_stability(c, make_request(), 0.3, 500, rng) == 1.0);
    }
    SUBCASE("a threshold component at the boundary flips half the time") {
        ComponentDescriptor c = make_component(0.9);
        c.sim.decision_rule.kind = DecisionRule::Kind::threshold;
        c.sim.decision_rule.feature = "x";
        c.sim.decision_rule.cut = 0.5;
        c.sim.decision_rule.below = "approve";
        c.sim.decision_rule.above = "deny";
        RngStream rng(4, "ips", 0);
        // Input sits exactly on the cut; jitter crosses it with mass 1/2.
        const double stability =
            input_perturbation_stability(c, make_request(), 0.1, 10000, rng);
        CHECK(stability == doctest::Approx(0.5).epsilon(0.04));
    }
    SUBCASE("tasks without numeric features are rejected") {
        const ComponentDescriptor c = make_component(1.0);
        InvocationRequest r = make_request();
        r.task.features.clear();
        r.task.features["label"] = std::string("categorical");
        RngStream rng(5, "ips", 0);
        CHECK_THROWS_AS(input_perturbation_stability(c, r, 0.1, 10, rng), NoNumericFeatures);
    }
}

TEST_CASE("context freshness decays linearly to the horizon") {
    auto item = [](Tick stamped) {
        ContextItem i;
        i.key = "k";
        i.stamped_at = stamped;
        return i;
    };
    SUBCASE("all items stamped now") {
        const std::vector<ContextItem> items = {item(100), item(100)};
        CHECK(context_freshness_index(items, 100, 50) == 1.0);
    }
    SUBCASE("an item aged exactly one horizon is stale") {
        const std::vector<ContextItem> items = {item(0)};
        CHECK(context_freshness_index(items, 100, 100) == 0.0);
    }
    SUBCASE("ages 0, 50, 100 with horizon 100 average to 0.5") {
        const std::vector<ContextItem> items = {item(100), item(50), item(0)};
        CHECK(context_freshness_index(items, 100, 100) == doctest::Approx(0.5));
    }
    SUBCASE("empty list is fully fresh; bad horizon is an error") {
        CHECK(context_freshness_index({}, 10, 5) == 1.0);
        CHECK_THROWS_AS(context_freshness_index({}, 10, 0), NonPositiveHorizon);
    }
}

TEST_CASE("context relevance precision") {
    auto item = [](bool relevant) {
        ContextItem i;
        i.key = "k";
        i.relevant = relevant;
        return i;
    };
    const std::vector<ContextItem> all = {item(true), item(true)};
    CHECK(context_relevance_precision(all) == 1.0);
    const std::vector<ContextItem> none = {item(false), item(false)};
    CHECK(context_relevance_precision(none) == 0.0);
    const std::vector<ContextItem> three_of_four = {item(true), item(true), item(true),
                                                    item(false)};
    CHECK(context_relevance_precision(three_of_four) == doctest::Approx(0.75));
    CHECK(context_relevance_precision({}) == 1.0);

    std::vector<ContextItem> unlabeled(1);
    unlabeled[0].key = "k";
    CHECK_THROWS_AS(context_relevance_precision(unlabeled), MissingRelevanceLabels);
}
