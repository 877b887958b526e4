#include "trace/metrics.hpp"

#include "trace/errors.hpp"

#include <algorithm>
#include <cmath>

namespace trace {

const char* to_string(MetricLayer l) {
    switch (l) {
        case MetricLayer::L1: return "L1";
        case MetricLayer::L2: return "L2";
        case MetricLayer::L3: return "L3";
        case MetricLayer::L4: return "L4";
        case MetricLayer::cross: return "cross";
        case MetricLayer::parsimony: return "parsimony";
    }
    return "cross";
}

namespace {

const std::vector<std::pair<std::string, MetricLayer>>& metric_table() {
    static const std::vector<std::pair<std::string, MetricLayer>> table = {
        {"rule_coverage_rate", MetricLayer::L1},
        {"rule_consistency_index", MetricLayer::L1},
        {"update_traceability_coefficient", MetricLayer::L1},
        {"context_relevance_precision", MetricLayer::L2},
        {"context_freshness_index", MetricLayer::L2},
        {"input_perturbation_stability_rate", MetricLayer::L2},
        {"escalation_precision", MetricLayer::L3},
        {"tier_cost_coefficient", MetricLayer::L3},
        {"false_positive_attenuation", MetricLayer::L3},
        {"review_burden_index", MetricLayer::L4},
        {"override_rate", MetricLayer::L4},
        {"escalation_snr", MetricLayer::L4},
        {"evidence_trail_completeness", MetricLayer::cross},
        {"calibration_error", MetricLayer::cross},
        {"autonomy_boundary_compliance", MetricLayer::cross},
        {"operational_stability_index", MetricLayer::cross},
        {"computational_parsimony_ratio", MetricLayer::parsimony},
    };
    return table;
}

} // namespace

const std::vector<std::string>& canonical_metric_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, layer] : metric_table()) out.push_back(name);
        return out;
    }();
    return names;
}

MetricLayer metric_layer(const std::string& name) {
    for (const auto& [n, layer] : metric_table()) {
        if (n == name) return layer;
    }
    throw IncompleteRun("not a canonical metric name: " + name);
}

bool is_canonical_metric(const std::string& name) {
    for (const auto& [n, layer] : metric_table()) {
        if (n == name) return true;
    }
    return false;
}

const std::set<std::string>& default_lower_is_better() {
    static const std::set<std::string> s = {"calibration_error", "tier_cost_coefficient",
                                            "review_burden_index", "override_rate"};
    return s;
}

double binomial_se(double value, int64_t n) {
    if (n <= 0) return 0.0;
    const double v = std::clamp(value, 0.0, 1.0);
    return std::sqrt(v * (1.0 - v) / static_cast<double>(n));
}

MetricValue oriented_for_composite(const MetricValue& m,
                                   const std::set<std::string>& lower_is_better) {
    MetricValue out = m;
    if (m.name == "tier_cost_coefficient") {
        const double t = std::max(m.value, 1.0);
        out.value = 1.0 / t;
        out.std_uncertainty = m.std_uncertainty / (t * t);
        return out;
    }
    if (m.name == "escalation_snr") {
        const double s = std::max(m.value, 0.0);
        out.value = s / (1.0 + s);
        out.std_uncertainty = m.std_uncertainty / ((1.0 + s) * (1.0 + s));
        return out;
    }
    if (lower_is_better.count(m.name)) {
        out.value = 1.0 - std::clamp(m.value, 0.0, 1.0);
        return out;  // unit sensitivity, uncertainty unchanged
    }
    out.value = std::clamp(m.value, 0.0, 1.0);
    return out;
}

namespace {

bool meets(const ComponentEval& e, const AdequacyRequirement& req) {
    return e.accuracy >= req.min_accuracy && e.ece <= req.max_calibration_error &&
           e.latency <= req.max_latency;
}

const ComponentEval& eval_of(const std::map<std::string, ComponentEval>& evals,
                             const std::string& component_id) {
    auto it = evals.find(component_id);
    if (it == evals.end()) {
        throw ConfigInvalid("cpr: no evaluation results for component " + component_id);
    }
    return it->second;
}

} // namespace

double cpr(const ComponentDescriptor& deployed,
           std::span<const ComponentDescriptor> inventory,
           const AdequacyRequirement& requirement,
           const std::map<std::string, ComponentEval>& eval_results,
           const CostWeights& weights) {
    if (!meets(eval_of(eval_results, deployed.component_id), requirement)) {
        throw InadequateDeployment("cpr: deployed component " + deployed.component_id +
                                   " fails the adequacy requirement; CPR undefined");
    }
    double cheapest = -1.0;
    for (const ComponentDescriptor& c : inventory) {
        if (!meets(eval_of(eval_results, c.component_id), requirement)) continue;
        const double cost = scalarize_cost(c.cost_per_invocation, weights);
        if (cheapest < 0.0 || cost < cheapest) cheapest = cost;
    }
    if (cheapest < 0.0) {
        throw NoAdequateComponent("cpr: no component in the inventory meets the requirement");
    }
    const double deployed_cost = scalarize_cost(deployed.cost_per_invocation, weights);
    if (deployed_cost <= 0.0) {
        throw ZeroMinimalCost("cpr: deployed component has nonpositive scalarized cost");
    }
    return cheapest / deployed_cost;
}

double autonomy_boundary_compliance(std::span<const AutonomyAction> actions) {
    if (actions.empty()) return 1.0;
    size_t compliant = 0;
    for (const AutonomyAction& a : actions) {
        if (a.executed_level <= a.granted_level) ++compliant;
    }
    return static_cast<double>(compliant) / static_cast<double>(actions.size());
}

double operational_stability_index(const std::map<std::string, std::vector<double>>& series,
                                   const std::map<std::string, double>& tolerances) {
    double max_drift = 0.0;
    for (const auto& [name, values] : series) {
        if (values.size() < 2) {
            throw SingleWindow("operational_stability_index: series '" + name +
                               "' has fewer than 2 windows");
        }
        auto it = tolerances.find(name);
        if (it == tolerances.end() || it->second <= 0.0) {
            throw ConfigInvalid("operational_stability_index: missing or nonpositive tolerance "
                                "for '" + name + "'");
        }
        for (size_t w = 1; w < values.size(); ++w) {
            max_drift = std::max(max_drift, std::abs(values[w] - values[0]) / it->second);
        }
    }
    return 1.0 - std::min(1.0, max_drift);
}

std::pair<double, double> gum_combine(std::span<const MetricValue> metrics,
                                      std::span<const double> weights) {
    if (metrics.size() != weights.size()) {
        throw WeightMismatch("gum_combine: " + std::to_string(metrics.size()) + " metrics vs " +
                             std::to_string(weights.size()) + " weights");
    }
    double composite = 0.0;
    double variance = 0.0;
    for (size_t i = 0; i < metrics.size(); ++i) {
        composite += weights[i] * metrics[i].value;
        variance += weights[i] * weights[i] * metrics[i].std_uncertainty *
                    metrics[i].std_uncertainty;
    }
    return {composite, std::sqrt(variance)};
}

TrustReport make_trust_report(std::vector<MetricValue> values,
                              const std::map<std::string, double>& metric_weights,
                              const std::set<std::string>& lower_is_better,
                              std::string scenario_id, uint64_t seed, Tick tick_begin,
                              Tick tick_end) {
    TrustReport report;
    for (MetricValue& v : values) {
        if (!is_canonical_metric(v.name)) {
            throw IncompleteRun("trust report: unknown metric '" + v.name + "'");
        }
        v.layer = metric_layer(v.name);
        if (!report.metrics.emplace(v.name, v).second) {
            throw IncompleteRun("trust report: duplicate metric '" + v.name + "'");
        }
    }
    if (report.metrics.size() != canonical_metric_names().size()) {
        throw IncompleteRun("trust report: expected " +
                            std::to_string(canonical_metric_names().size()) + " metrics, got " +
                            std::to_string(report.metrics.size()));
    }

    std::vector<MetricValue> oriented;
    std::vector<double> weights;
    double weight_sum = 0.0;
    for (const std::string& name : canonical_metric_names()) {
        auto wit = metric_weights.find(name);
        const double w = wit == metric_weights.end() ? 1.0 : wit->second;
        oriented.push_back(oriented_for_composite(report.metrics.at(name), lower_is_better));
        weights.push_back(w);
        weight_sum += w;
    }
    if (weight_sum <= 0.0) throw WeightMismatch("trust report: metric weights sum to zero");
    for (double& w : weights) w /= weight_sum;
    std::tie(report.composite_trust_score, report.composite_uncertainty) =
        gum_combine(oriented, weights);

    report.scenario_id = std::move(scenario_id);
    report.seed = seed;
    report.tick_begin = tick_begin;
    report.tick_end = tick_end;
    return report;
}

json trust_report_to_json(const TrustReport& r) {
    json metrics = json::object();
    for (const auto& [name, m] : r.metrics) {
        metrics[name] = {{"value", m.value},
                         {"std_uncertainty", m.std_uncertainty},
                         {"n", m.n},
                         {"layer", to_string(m.layer)}};
    }
    return {{"metrics", metrics},
            {"composite_trust_score", r.composite_trust_score},
            {"composite_uncertainty", r.composite_uncertainty},
            {"scenario_id", r.scenario_id},
            {"seed", r.seed},
            {"tick_begin", r.tick_begin},
            {"tick_end", r.tick_end}};
}

TrustReport trust_report_from_json(const json& j) {
    TrustReport r;
    for (const auto& [name, m] : j.at("metrics").items()) {
        MetricValue v;
        v.name = name;
        v.value = m.at("value").get<double>();
        v.std_uncertainty = m.at("std_uncertainty").get<double>();
        v.n = m.at("n").get<int64_t>();
        v.layer = metric_layer(name);
        r.metrics.emplace(name, v);
    }
    if (r.metrics.size() != canonical_metric_names().size()) {
        throw IncompleteRun("trust report: expected " +
                            std::to_string(canonical_metric_names().size()) + " metrics, got " +
                            std::to_string(r.metrics.size()));
    }
    r.composite_trust_score = j.at("composite_trust_score").get<double>();
    r.composite_uncertainty = j.at("composite_uncertainty").get<double>();
    r.scenario_id = j.value("scenario_id", std::string());
    r.seed = j.value("seed", 0ULL);
    r.tick_begin = j.value("tick_begin", static_cast<Tick>(0));
    r.tick_end = j.value("tick_end", static_cast<Tick>(0));
    return r;
}

} // namespace trace
