#include "trace/l2_inventory.hpp"

#include "trace/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trace {

const char* to_string(ComponentClass c) {
    return c == ComponentClass::L2a ? "L2a" : "L2b";
}

ComponentClass component_class_from_string(const std::string& s) {
    if (s == "L2a") return ComponentClass::L2a;
    if (s == "L2b") return ComponentClass::L2b;
    throw ConfigInvalid("unknown component class: " + s);
}

DecisionNoise draw_decision_noise(RngStream& rng) {
    // Fixed draw order; every invocation consumes the same stream width.
    DecisionNoise n;
    n.u_hallucination = rng.next_double();
    n.u_correct = rng.next_double();
    n.wrong_label_pick = rng.next_u64();
    n.u_confidence = rng.next_double();
    n.u_halluc_conf = rng.next_double();
    return n;
}

namespace {

std::string pick_other_label(const std::vector<std::string>& alphabet,
                             const std::string& excluded, uint64_t pick) {
    std::vector<const std::string*> others;
    others.reserve(alphabet.size());
    for (const std::string& l : alphabet) {
        if (l != excluded) others.push_back(&l);
    }
    if (others.empty()) return excluded;
    return *others[pick % others.size()];
}

double numeric_feature_or_zero(const TaskInstance& task, const std::string& name) {
    auto it = task.features.find(name);
    if (it == task.features.end()) return 0.0;
    if (!std::holds_alternative<double>(it->second)) return 0.0;
    return std::get<double>(it->second);
}

} // namespace

Verdict invoke_with_noise(const ComponentDescriptor& component,
                          const InvocationRequest& request, const DecisionNoise& noise) {
    if (!component.supported_task_types.count(request.task.task_type)) {
        throw UnsupportedTaskType("component " + component.component_id +
                                  " does not support task type " + request.task.task_type);
    }
    const SimulatedComponentSpec& spec = component.sim;

    double error = 1.0 - std::clamp(spec.accuracy, 0.0, 1.0);
    if (request.attempt > 1 && request.expanded_context) {
        error *= std::clamp(spec.context_gain, 0.0, 1.0);
    }
    const double effective_accuracy = 1.0 - error;

    Verdict v;
    v.source = std::string(to_string(component.component_class)) + ":" + component.component_id;
    v.cost = component.cost_per_invocation;
    v.cost.latency += static_cast<double>(spec.latency_ticks);

    if (spec.decision_rule.kind == DecisionRule::Kind::threshold) {
        const double x = numeric_feature_or_zero(request.task, spec.decision_rule.feature);
        v.decision = x < spec.decision_rule.cut ? spec.decision_rule.below
                                                : spec.decision_rule.above;
    } else {
        if (!request.task.ground_truth) {
            throw NoGroundTruth("stochastic simulated component requires ground truth (task " +
                                request.task.task_id + ")");
        }
        const std::string& truth = *request.task.ground_truth;
        if (noise.u_correct < effective_accuracy) {
            v.decision = truth;
        } else {
            v.decision = pick_other_label(request.alphabet, truth, noise.wrong_label_pick);
        }
    }

    // Hallucination: a fabricated label delivered with high confidence.
    if (component.component_class == ComponentClass::L2b &&
        noise.u_hallucination < spec.hallucination_rate) {
        const std::string& avoid =
            request.task.ground_truth ? *request.task.ground_truth : v.decision;
        v.decision = pick_other_label(request.alphabet, avoid, noise.wrong_label_pick);
        v.confidence = 0.9 + 0.1 * noise.u_halluc_conf;
        return v;
    }

    const double jitter = spec.confidence_noise * (2.0 * noise.u_confidence - 1.0);
    v.confidence =
        std::clamp(effective_accuracy + spec.miscalibration_shift + jitter, 0.0, 1.0);
    return v;
}

Verdict invoke(const ComponentDescriptor& component, const InvocationRequest& request,
               RngStream& rng) {
    return invoke_with_noise(component, request, draw_decision_noise(rng));
}

double expected_calibration_error(std::span<const std::pair<double, bool>> pairs, int bins) {
    if (pairs.empty()) throw EmptyInput("expected_calibration_error: no pairs");
    if (bins < 1) throw EmptyInput("expected_calibration_error: bins must be >= 1");
    std::vector<double> conf_sum(bins, 0.0);
    std::vector<double> acc_sum(bins, 0.0);
    std::vector<size_t> count(bins, 0);
    for (const auto& [confidence, correct] : pairs) {
        // Right-closed bins ((b-1)/B, b/B]; confidence 0 lands in the first.
        int idx = static_cast<int>(std::ceil(confidence * bins)) - 1;
        idx = std::clamp(idx, 0, bins - 1);
        conf_sum[idx] += confidence;
        acc_sum[idx] += correct ? 1.0 : 0.0;
        ++count[idx];
    }
    const double n = static_cast<double>(pairs.size());
    double ece = 0.0;
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0) continue;
        const double nb = static_cast<double>(count[b]);
        ece += (nb / n) * std::abs(acc_sum[b] / nb - conf_sum[b] / nb);
    }
    return ece;
}

double input_perturbation_stability(const ComponentDescriptor& component,
                                    const InvocationRequest& request,
                                    double perturbation_magnitude, int n, RngStream& rng) {
    if (n < 1) throw EmptyInput("input_perturbation_stability: n must be >= 1");
    std::vector<std::string> numeric_features;
    for (const auto& [name, value] : request.task.features) {
        if (std::holds_alternative<double>(value)) numeric_features.push_back(name);
    }
    if (numeric_features.empty()) {
        throw NoNumericFeatures("input_perturbation_stability: task " + request.task.task_id +
                                " has no numeric features");
    }
    const DecisionNoise noise = draw_decision_noise(rng);
    const std::string base = invoke_with_noise(component, request, noise).decision;
    int hits = 0;
    InvocationRequest replica = request;
    for (int i = 0; i < n; ++i) {
        for (const std::string& name : numeric_features) {
            const double original = std::get<double>(request.task.features.at(name));
            replica.task.features[name] =
                original + rng.uniform_real(-perturbation_magnitude, perturbation_magnitude);
        }
        if (invoke_with_noise(component, replica, noise).decision == base) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

double context_freshness_index(std::span<const ContextItem> items, Tick now, Tick horizon) {
    if (horizon <= 0) throw NonPositiveHorizon("context_freshness_index: horizon must be > 0");
    if (items.empty()) return 1.0;
    double sum = 0.0;
    for (const ContextItem& item : items) {
        const double age = static_cast<double>(now - item.stamped_at);
        sum += std::clamp(1.0 - age / static_cast<double>(horizon), 0.0, 1.0);
    }
    return sum / static_cast<double>(items.size());
}

double context_relevance_precision(std::span<const ContextItem> supplied) {
    if (supplied.empty()) return 1.0;
    size_t relevant = 0;
    for (const ContextItem& item : supplied) {
        if (!item.relevant.has_value()) {
            throw MissingRelevanceLabels("context_relevance_precision: item '" + item.key +
                                         "' has no relevance label");
        }
        if (*item.relevant) ++relevant;
    }
    return static_cast<double>(relevant) / static_cast<double>(supplied.size());
}

} // namespace trace
