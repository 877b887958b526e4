#pragma once

#include "trace/l2_inventory.hpp"
#include "trace/l3_policy.hpp"
#include "trace/types.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace trace {

// What "adequately solves the sub-task" means for parsimony analysis.
struct AdequacyRequirement {
    double min_accuracy = 0.0;
    double max_calibration_error = 1.0;
    double max_latency = 0.0;  // milliseconds
};

// Measured evaluation of one component against the requirement axes.
struct ComponentEval {
    double accuracy = 0.0;
    double ece = 1.0;
    double latency = 0.0;
};

enum class MetricLayer { L1, L2, L3, L4, cross, parsimony };
const char* to_string(MetricLayer l);

struct MetricValue {
    std::string name;
    double value = 0.0;
    double std_uncertainty = 0.0;
    int64_t n = 0;
    MetricLayer layer = MetricLayer::cross;
};

// The canonical suite: 12 layer-wise, 4 cross-cutting, 1 parsimony metric.
const std::vector<std::string>& canonical_metric_names();
MetricLayer metric_layer(const std::string& name);
bool is_canonical_metric(const std::string& name);

// Metrics read "lower is better" before compositing.
const std::set<std::string>& default_lower_is_better();

// Binomial standard error sqrt(v(1-v)/n); 0 when n == 0.
double binomial_se(double value, int64_t n);

// Maps a metric onto the [0,1] higher-is-better scale used by the composite,
// propagating the uncertainty through the mapping's sensitivity.
//   - lower-is-better metrics in [0,1]: 1 - v
//   - tier_cost_coefficient (>= 1):      1 / max(v, 1)
//   - escalation_snr (unbounded):        v / (1 + v)
MetricValue oriented_for_composite(const MetricValue& m,
                                   const std::set<std::string>& lower_is_better);

// Computational Parsimony Ratio: cost of the most economical component that
// meets the requirement, divided by the cost of the deployed one. Throws
// InadequateDeployment when the deployed component itself fails the
// requirement and NoAdequateComponent when nothing in the inventory passes.
double cpr(const ComponentDescriptor& deployed,
           std::span<const ComponentDescriptor> inventory,
           const AdequacyRequirement& requirement,
           const std::map<std::string, ComponentEval>& eval_results,
           const CostWeights& weights);

struct AutonomyAction {
    AutonomyLevel executed_level = AutonomyLevel::advise_only;
    AutonomyLevel granted_level = AutonomyLevel::advise_only;
};

// Fraction of actions executed at or below the granted level; 1.0 for none.
double autonomy_boundary_compliance(std::span<const AutonomyAction> actions);

// 1 - min(1, max drift from the first window, in tolerance units). Series
// maps metric name -> per-window values; every series needs a tolerance > 0.
double operational_stability_index(const std::map<std::string, std::vector<double>>& series,
                                   const std::map<std::string, double>& tolerances);

// GUM weighted combination: composite = sum(w_i v_i) with combined standard
// uncertainty sqrt(sum(w_i^2 u_i^2)). Values must arrive pre-oriented.
std::pair<double, double> gum_combine(std::span<const MetricValue> metrics,
                                      std::span<const double> weights);

struct TrustReport {
    std::map<std::string, MetricValue> metrics;  // exactly the canonical 17
    double composite_trust_score = 0.0;
    double composite_uncertainty = 0.0;
    std::string scenario_id;
    uint64_t seed = 0;
    Tick tick_begin = 0;
    Tick tick_end = 0;
};

// Assembles a report, enforcing suite cardinality (throws IncompleteRun) and
// computing the composite under the given weights and orientation map.
// Weights are per-metric and are normalized to sum to 1.
TrustReport make_trust_report(std::vector<MetricValue> values,
                              const std::map<std::string, double>& metric_weights,
                              const std::set<std::string>& lower_is_better,
                              std::string scenario_id, uint64_t seed, Tick tick_begin,
                              Tick tick_end);

json trust_report_to_json(const TrustReport& r);
TrustReport trust_report_from_json(const json& j);

} // namespace trace
