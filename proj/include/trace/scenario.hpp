#pragma once

#include "trace/l1_rules.hpp"
#include "trace/l2_inventory.hpp"
#include "trace/l3_policy.hpp"
#include "trace/l4_supervision.hpp"
#include "trace/metrics.hpp"
#include "trace/types.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace trace {

// Declarative task generators: finite categorical and uniform distributions
// only, so configs stay serializable and diffable.

struct GeneratorFeature {
    enum class Kind { uniform, categorical };
    std::string name;
    Kind kind = Kind::uniform;
    double lo = 0.0, hi = 1.0;                                 // uniform
    std::vector<std::pair<std::string, double>> categories;    // categorical
};

struct AlphabetSpec {
    std::vector<std::string> labels;
    std::map<std::string, RuleActionKind> polarity;  // label -> allow|deny
};

struct GroundTruthSpec {
    enum class Kind { categorical, threshold };
    Kind kind = Kind::categorical;
    std::vector<std::pair<std::string, double>> categories;
    std::string feature;  // threshold
    double cut = 0.5;
    std::string below, above;
    double flip_probability = 0.0;  // label noise on threshold truth
};

struct ContextGeneratorSpec {
    int min_items = 0;
    int max_items = 0;
    double relevant_prob = 1.0;
    Tick max_staleness = 0;
};

struct TaskGeneratorSpec {
    std::vector<std::pair<std::string, double>> task_types;
    std::vector<std::pair<std::string, double>> risk_classes;
    std::vector<GeneratorFeature> features;
    std::map<std::string, AlphabetSpec> alphabets;       // per task type
    std::map<std::string, GroundTruthSpec> ground_truth;  // per task type
    ContextGeneratorSpec context;
};

struct AutonomyConfig {
    AutonomyThresholds thresholds;
    AutonomyLevel initial_level = AutonomyLevel::act_autonomously;
};

struct OsiConfig {
    int windows = 4;
    std::map<std::string, double> tolerances = {
        {"calibration_error", 0.1}, {"review_burden_index", 0.1}, {"override_rate", 0.1}};
};

struct SubDomainConfig {
    std::string label;
    int64_t n_tasks = 0;
    RuleSet ruleset;
    std::vector<ComponentDescriptor> components;
    std::map<std::string, InvocationPlan> plans;  // per task type
    EscalationTriggerSpec trigger;
    AdjudicatorModel adjudicator;
    TaskGeneratorSpec generator;
    AutonomyConfig autonomy;
    AdequacyRequirement adequacy;
    std::string cpr_task_type;  // empty = first plan's task type (sorted)
    std::string cpr_deployed;   // empty = first step of that plan
    Tick freshness_horizon = 100;
    double ips_magnitude = 0.05;
    int ips_replicas = 200;
    double context_supply_fraction = 0.5;  // share of items supplied on attempt 1
};

struct PipelineStage {
    std::string sub_domain;
    std::string task_type;
};

struct CrossDomainPipeline {
    std::string pipeline_id;
    int64_t n_tasks = 0;
    std::vector<PipelineStage> stages;  // >= 2; decision k feeds a feature of k+1
};

struct ScenarioConfig {
    std::string scenario_id;
    uint64_t seed = 0;
    Tick tick_limit = 1'000'000;
    std::vector<SubDomainConfig> sub_domains;
    std::vector<CrossDomainPipeline> pipelines;
    CostWeights cost_weights;
    std::map<std::string, double> metric_weights;  // empty = uniform
    std::set<std::string> lower_is_better = default_lower_is_better();
    OsiConfig osi;
};

// Round-trip serialization. to_json emits the fully resolved form (all
// defaults materialized) so that a serialized config reruns identically.
json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const json& j);  // throws ConfigInvalid

// Structural and cross-reference validation. Returns one "<json-path>:
// <message>" entry per violation; empty means the document is valid.
std::vector<std::string> validate_scenario_json(const json& j);

// Bundled scenario presets.
const std::vector<std::string>& preset_names();
ScenarioConfig load_preset(const std::string& name);  // throws UnknownPreset

// Digest of the canonical serialized config, recorded in run metadata.
std::string config_digest(const ScenarioConfig& config);

} // namespace trace
