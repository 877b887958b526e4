#pragma once

#include "trace/rng.hpp"
#include "trace/types.hpp"

#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trace {

enum class ComponentClass { L2a, L2b };

const char* to_string(ComponentClass c);
ComponentClass component_class_from_string(const std::string& s);

// How a simulated component turns a task into a decision. `stochastic`
// components emit the ground truth with probability accuracy and ignore
// features; `threshold` components cut on one numeric feature, which gives
// perturbation-stability probes something real to measure.
struct DecisionRule {
    enum class Kind { stochastic, threshold };
    Kind kind = Kind::stochastic;
    std::string feature;
    double cut = 0.5;
    std::string below;  // decision when feature < cut
    std::string above;
};

struct SimulatedComponentSpec {
    double accuracy = 1.0;
    double confidence_noise = 0.0;       // reported confidence jitter, uniform +-
    double miscalibration_shift = 0.0;   // additive bias, result clipped to [0,1]
    double hallucination_rate = 0.0;     // L2b only: fabricated label at confidence >= 0.9
    int latency_ticks = 0;
    double context_gain = 0.5;           // error multiplier under expanded re-invocation
    DecisionRule decision_rule;
};

// Catalogue entry of the stateless learned-component inventory. The
// simulated spec doubles as the calibration profile (true confidence ->
// reported confidence via shift and noise).
struct ComponentDescriptor {
    std::string component_id;
    ComponentClass component_class = ComponentClass::L2a;
    CostVector cost_per_invocation;
    double capability = 1.0;  // scenario-configured accuracy on its task types
    SimulatedComponentSpec sim;
    std::set<std::string> supported_task_types;
};

struct InvocationRequest {
    TaskInstance task;
    std::vector<ContextItem> supplied_context;  // subset of task.context_items
    std::vector<std::string> alphabet;          // task type's decision labels
    int attempt = 1;                            // 1 = first pass
    bool expanded_context = false;              // strictly more context than attempt 1
};

// The stochastic draws of one invocation, separated out so that
// perturbation-stability probes can replay the identical noise against
// jittered inputs.
struct DecisionNoise {
    double u_hallucination = 1.0;
    double u_correct = 1.0;
    uint64_t wrong_label_pick = 0;
    double u_confidence = 0.5;   // mapped to uniform +-confidence_noise
    double u_halluc_conf = 0.0;  // mapped to [0.9, 1.0]
};

DecisionNoise draw_decision_noise(RngStream& rng);

// Stateless simulated invocation: the verdict depends only on the component
// spec, the request, and the rng stream position. Throws UnsupportedTaskType
// when the task type is not in the component's inventory entry.
Verdict invoke(const ComponentDescriptor& component, const InvocationRequest& request,
               RngStream& rng);

// Same, with the decision noise fixed by the caller.
Verdict invoke_with_noise(const ComponentDescriptor& component,
                          const InvocationRequest& request, const DecisionNoise& noise);

// Equal-width-bin ECE over [0,1], right-closed bins, empty bins contribute 0.
double expected_calibration_error(std::span<const std::pair<double, bool>> pairs, int bins);

// Fraction of n perturbed replicas (each numeric feature jittered uniformly
// within +-magnitude, decision noise shared with the unperturbed call) whose
// decision equals the unperturbed decision.
double input_perturbation_stability(const ComponentDescriptor& component,
                                    const InvocationRequest& request,
                                    double perturbation_magnitude, int n, RngStream& rng);

// Mean over items of max(0, 1 - age/horizon); 1.0 for an empty list.
double context_freshness_index(std::span<const ContextItem> items, Tick now, Tick horizon);

// Fraction of supplied items labeled relevant; 1.0 for an empty set.
double context_relevance_precision(std::span<const ContextItem> supplied);

} // namespace trace
