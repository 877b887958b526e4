#include "trace/scenario.hpp"

#include "trace/digest.hpp"
#include "trace/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trace {

namespace {

json weighted_to_json(const std::vector<std::pair<std::string, double>>& entries) {
    json out = json::array();
    for (const auto& [value, weight] : entries) {
        out.push_back({{"value", value}, {"weight", weight}});
    }
    return out;
}

std::vector<std::pair<std::string, double>> weighted_from_json(const json& j) {
    std::vector<std::pair<std::string, double>> out;
    for (const json& e : j) {
        out.emplace_back(e.at("value").get<std::string>(), e.at("weight").get<double>());
    }
    return out;
}

json guard_to_json(const std::vector<GuardAtom>& guard) {
    json out = json::array();
    for (const GuardAtom& a : guard) {
        out.push_back({{"lhs", a.lhs}, {"op", to_string(a.op)}, {"rhs", a.rhs}});
    }
    return out;
}

json action_to_json(const RuleAction& a) {
    json out = {{"kind", to_string(a.kind)}};
    if (a.kind == RuleActionKind::route) out["target"] = a.route_target;
    return out;
}

RuleAction action_from_json(const json& j) {
    RuleAction a;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "allow") {
        a.kind = RuleActionKind::allow;
    } else if (kind == "deny") {
        a.kind = RuleActionKind::deny;
    } else if (kind == "mandate_escalation") {
        a.kind = RuleActionKind::mandate_escalation;
    } else if (kind == "route") {
        a.kind = RuleActionKind::route;
        a.route_target = j.at("target").get<std::string>();
    } else {
        throw ConfigInvalid("unknown rule action kind: " + kind);
    }
    return a;
}

json rule_to_json(const Rule& r) {
    return {{"rule_id", r.rule_id},
            {"version", r.version},
            {"priority", r.priority},
            {"guard", guard_to_json(r.guard)},
            {"action", action_to_json(r.action)}};
}

Rule rule_from_json(const json& j) {
    Rule r;
    r.rule_id = j.at("rule_id").get<std::string>();
    r.version = j.at("version").get<int>();
    r.priority = j.value("priority", 0);
    for (const json& a : j.value("guard", json::array())) {
        GuardAtom atom;
        atom.lhs = a.at("lhs").get<std::string>();
        atom.op = compare_op_from_string(a.at("op").get<std::string>());
        atom.rhs = a.at("rhs");
        r.guard.push_back(std::move(atom));
    }
    r.action = action_from_json(j.at("action"));
    return r;
}

json update_to_json(const RuleUpdate& u) {
    json out = {{"rule_id", u.rule_id},
                {"new_version", u.new_version},
                {"author", u.author},
                {"rationale", u.rationale},
                {"prior_version_hash", u.prior_version_hash},
                {"new_rule_hash", u.new_rule_hash}};
    if (u.timestamp) out["timestamp"] = *u.timestamp;
    return out;
}

RuleUpdate update_from_json(const json& j) {
    RuleUpdate u;
    u.rule_id = j.at("rule_id").get<std::string>();
    u.new_version = j.at("new_version").get<int>();
    u.author = j.value("author", std::string());
    u.rationale = j.value("rationale", std::string());
    u.prior_version_hash = j.value("prior_version_hash", std::string());
    u.new_rule_hash = j.value("new_rule_hash", std::string());
    if (j.contains("timestamp") && !j["timestamp"].is_null()) {
        u.timestamp = j["timestamp"].get<int64_t>();
    }
    return u;
}

json component_to_json(const ComponentDescriptor& c) {
    json rule;
    if (c.sim.decision_rule.kind == DecisionRule::Kind::threshold) {
        rule = {{"kind", "threshold"},
                {"feature", c.sim.decision_rule.feature},
                {"cut", c.sim.decision_rule.cut},
                {"below", c.sim.decision_rule.below},
                {"above", c.sim.decision_rule.above}};
    } else {
        rule = {{"kind", "stochastic"}};
    }
    return {{"component_id", c.component_id},
            {"class", to_string(c.component_class)},
            {"cost", c.cost_per_invocation},
            {"capability", c.capability},
            {"supported_task_types",
             std::vector<std::string>(c.supported_task_types.begin(),
                                      c.supported_task_types.end())},
            {"sim",
             {{"accuracy", c.sim.accuracy},
              {"confidence_noise", c.sim.confidence_noise},
              {"miscalibration_shift", c.sim.miscalibration_shift},
              {"hallucination_rate", c.sim.hallucination_rate},
              {"latency_ticks", c.sim.latency_ticks},
              {"context_gain", c.sim.context_gain},
              {"decision_rule", rule}}}};
}

ComponentDescriptor component_from_json(const json& j) {
    ComponentDescriptor c;
    c.component_id = j.at("component_id").get<std::string>();
    c.component_class = component_class_from_string(j.at("class").get<std::string>());
    c.cost_per_invocation = j.value("cost", CostVector{});
    c.capability = j.value("capability", 1.0);
    for (const json& t : j.at("supported_task_types")) {
        c.supported_task_types.insert(t.get<std::string>());
    }
    const json& sim = j.at("sim");
    c.sim.accuracy = sim.value("accuracy", 1.0);
    c.sim.confidence_noise = sim.value("confidence_noise", 0.0);
    c.sim.miscalibration_shift = sim.value("miscalibration_shift", 0.0);
    c.sim.hallucination_rate = sim.value("hallucination_rate", 0.0);
    c.sim.latency_ticks = sim.value("latency_ticks", 0);
    c.sim.context_gain = sim.value("context_gain", 0.5);
    if (sim.contains("decision_rule") && sim["decision_rule"].value("kind", "stochastic") ==
                                             std::string("threshold")) {
        const json& r = sim["decision_rule"];
        c.sim.decision_rule.kind = DecisionRule::Kind::threshold;
        c.sim.decision_rule.feature = r.at("feature").get<std::string>();
        c.sim.decision_rule.cut = r.at("cut").get<double>();
        c.sim.decision_rule.below = r.at("below").get<std::string>();
        c.sim.decision_rule.above = r.at("above").get<std::string>();
    }
    return c;
}

json generator_to_json(const TaskGeneratorSpec& g) {
    json features = json::array();
    for (const GeneratorFeature& f : g.features) {
        if (f.kind == GeneratorFeature::Kind::uniform) {
            features.push_back({{"name", f.name}, {"kind", "uniform"}, {"lo", f.lo}, {"hi", f.hi}});
        } else {
            features.push_back(
                {{"name", f.name}, {"kind", "categorical"}, {"categories", weighted_to_json(f.categories)}});
        }
    }
    json alphabets = json::object();
    for (const auto& [type, a] : g.alphabets) {
        json polarity = json::object();
        for (const auto& [label, kind] : a.polarity) polarity[label] = to_string(kind);
        alphabets[type] = {{"labels", a.labels}, {"polarity", polarity}};
    }
    json truth = json::object();
    for (const auto& [type, t] : g.ground_truth) {
        if (t.kind == GroundTruthSpec::Kind::categorical) {
            truth[type] = {{"kind", "categorical"}, {"categories", weighted_to_json(t.categories)}};
        } else {
            truth[type] = {{"kind", "threshold"},
                           {"feature", t.feature},
                           {"cut", t.cut},
                           {"below", t.below},
                           {"above", t.above},
                           {"flip_probability", t.flip_probability}};
        }
    }
    return {{"task_types", weighted_to_json(g.task_types)},
            {"risk_classes", weighted_to_json(g.risk_classes)},
            {"features", features},
            {"alphabets", alphabets},
            {"ground_truth", truth},
            {"context",
             {{"min_items", g.context.min_items},
              {"max_items", g.context.max_items},
              {"relevant_prob", g.context.relevant_prob},
              {"max_staleness", g.context.max_staleness}}}};
}

TaskGeneratorSpec generator_from_json(const json& j) {
    TaskGeneratorSpec g;
    g.task_types = weighted_from_json(j.at("task_types"));
    g.risk_classes = weighted_from_json(j.at("risk_classes"));
    for (const json& f : j.value("features", json::array())) {
        GeneratorFeature feature;
        feature.name = f.at("name").get<std::string>();
        if (f.value("kind", "uniform") == std::string("categorical")) {
            feature.kind = GeneratorFeature::Kind::categorical;
            feature.categories = weighted_from_json(f.at("categories"));
        } else {
            feature.kind = GeneratorFeature::Kind::uniform;
            feature.lo = f.value("lo", 0.0);
            feature.hi = f.value("hi", 1.0);
        }
        g.features.push_back(std::move(feature));
    }
    for (const auto& [type, a] : j.at("alphabets").items()) {
        AlphabetSpec spec;
        for (const json& l : a.at("labels")) spec.labels.push_back(l.get<std::string>());
        const json polarity = a.value("polarity", json::object());
        for (const auto& [label, kind] : polarity.items()) {
            const std::string k = kind.get<std::string>();
            spec.polarity[label] = k == "allow" ? RuleActionKind::allow : RuleActionKind::deny;
        }
        g.alphabets[type] = std::move(spec);
    }
    for (const auto& [type, t] : j.at("ground_truth").items()) {
        GroundTruthSpec spec;
        if (t.value("kind", "categorical") == std::string("threshold")) {
            spec.kind = GroundTruthSpec::Kind::threshold;
            spec.feature = t.at("feature").get<std::string>();
            spec.cut = t.at("cut").get<double>();
            spec.below = t.at("below").get<std::string>();
            spec.above = t.at("above").get<std::string>();
            spec.flip_probability = t.value("flip_probability", 0.0);
        } else {
            spec.kind = GroundTruthSpec::Kind::categorical;
            spec.categories = weighted_from_json(t.at("categories"));
        }
        g.ground_truth[type] = std::move(spec);
    }
    const json& ctx = j.value("context", json::object());
    g.context.min_items = ctx.value("min_items", 0);
    g.context.max_items = ctx.value("max_items", 0);
    g.context.relevant_prob = ctx.value("relevant_prob", 1.0);
    g.context.max_staleness = ctx.value("max_staleness", static_cast<Tick>(0));
    return g;
}

json sub_domain_to_json(const SubDomainConfig& s) {
    json rules = json::array();
    for (const Rule& r : s.ruleset.rules) rules.push_back(rule_to_json(r));
    json updates = json::array();
    for (const RuleUpdate& u : s.ruleset.update_log) updates.push_back(update_to_json(u));
    json components = json::array();
    for (const ComponentDescriptor& c : s.components) components.push_back(component_to_json(c));
    json plans = json::object();
    for (const auto& [type, p] : s.plans) {
        plans[type] = {{"steps", p.steps}, {"ordering_mode", to_string(p.ordering_mode)}};
    }
    return {{"label", s.label},
            {"n_tasks", s.n_tasks},
            {"ruleset", {{"rules", rules}, {"update_log", updates}}},
            {"components", components},
            {"plans", plans},
            {"trigger",
             {{"risk_threshold", to_string(s.trigger.risk_threshold)},
              {"confidence_threshold", s.trigger.confidence_threshold},
              {"inconsistency_threshold", s.trigger.inconsistency_threshold},
              {"reinvocation_budget", s.trigger.reinvocation_budget}}},
            {"adjudicator",
             {{"competence", s.adjudicator.competence},
              {"review_cost", s.adjudicator.review_cost},
              {"veto_enabled", s.adjudicator.veto_enabled}}},
            {"generator", generator_to_json(s.generator)},
            {"autonomy",
             {{"initial_level", to_string(s.autonomy.initial_level)},
              {"window_min", s.autonomy.thresholds.window_min},
              {"max_override_rate", s.autonomy.thresholds.max_override_rate},
              {"max_calibration_error", s.autonomy.thresholds.max_calibration_error},
              {"min_escalation_precision", s.autonomy.thresholds.min_escalation_precision}}},
            {"adequacy",
             {{"min_accuracy", s.adequacy.min_accuracy},
              {"max_calibration_error", s.adequacy.max_calibration_error},
              {"max_latency", s.adequacy.max_latency}}},
            {"cpr_task_type", s.cpr_task_type},
            {"cpr_deployed", s.cpr_deployed},
            {"freshness_horizon", s.freshness_horizon},
            {"ips_magnitude", s.ips_magnitude},
            {"ips_replicas", s.ips_replicas},
            {"context_supply_fraction", s.context_supply_fraction}};
}

SubDomainConfig sub_domain_from_json(const json& j) {
    SubDomainConfig s;
    s.label = j.at("label").get<std::string>();
    s.n_tasks = j.at("n_tasks").get<int64_t>();
    for (const json& r : j.at("ruleset").value("rules", json::array())) {
        s.ruleset.rules.push_back(rule_from_json(r));
    }
    for (const json& u : j.at("ruleset").value("update_log", json::array())) {
        s.ruleset.update_log.push_back(update_from_json(u));
    }
    for (const json& c : j.at("components")) s.components.push_back(component_from_json(c));
    for (const auto& [type, p] : j.at("plans").items()) {
        InvocationPlan plan;
        plan.task_type = type;
        for (const json& step : p.at("steps")) plan.steps.push_back(step.get<std::string>());
        plan.ordering_mode = plan_ordering_from_string(p.value("ordering_mode", "as_listed"));
        s.plans[type] = std::move(plan);
    }
    const json& t = j.at("trigger");
    s.trigger.risk_threshold = risk_class_from_string(t.value("risk_threshold", "high"));
    s.trigger.confidence_threshold = t.at("confidence_threshold").get<double>();
    s.trigger.inconsistency_threshold = t.at("inconsistency_threshold").get<double>();
    s.trigger.reinvocation_budget = t.at("reinvocation_budget").get<int>();
    const json& a = j.at("adjudicator");
    s.adjudicator.competence = a.at("competence").get<double>();
    s.adjudicator.review_cost = a.value("review_cost", CostVector{});
    s.adjudicator.veto_enabled = a.value("veto_enabled", false);
    s.generator = generator_from_json(j.at("generator"));
    const json& au = j.value("autonomy", json::object());
    s.autonomy.initial_level =
        autonomy_level_from_string(au.value("initial_level", "act_autonomously"));
    s.autonomy.thresholds.window_min = au.value("window_min", 100);
    s.autonomy.thresholds.max_override_rate = au.value("max_override_rate", 0.05);
    s.autonomy.thresholds.max_calibration_error = au.value("max_calibration_error", 0.05);
    s.autonomy.thresholds.min_escalation_precision = au.value("min_escalation_precision", 0.8);
    const json& adq = j.value("adequacy", json::object());
    s.adequacy.min_accuracy = adq.value("min_accuracy", 0.0);
    s.adequacy.max_calibration_error = adq.value("max_calibration_error", 1.0);
    s.adequacy.max_latency = adq.value("max_latency", 0.0);
    s.cpr_task_type = j.value("cpr_task_type", std::string());
    s.cpr_deployed = j.value("cpr_deployed", std::string());
    s.freshness_horizon = j.value("freshness_horizon", static_cast<Tick>(100));
    s.ips_magnitude = j.value("ips_magnitude", 0.05);
    s.ips_replicas = j.value("ips_replicas", 200);
    s.context_supply_fraction = j.value("context_supply_fraction", 0.5);
    return s;
}

} // namespace

json scenario_to_json(const ScenarioConfig& config) {
    json subs = json::array();
    for (const SubDomainConfig& s : config.sub_domains) subs.push_back(sub_domain_to_json(s));
    json pipelines = json::array();
    for (const CrossDomainPipeline& p : config.pipelines) {
        json stages = json::array();
        for (const PipelineStage& st : p.stages) {
            stages.push_back({{"sub_domain", st.sub_domain}, {"task_type", st.task_type}});
        }
        pipelines.push_back(
            {{"pipeline_id", p.pipeline_id}, {"n_tasks", p.n_tasks}, {"stages", stages}});
    }
    return {{"scenario_id", config.scenario_id},
            {"seed", config.seed},
            {"tick_limit", config.tick_limit},
            {"sub_domains", subs},
            {"pipelines", pipelines},
            {"cost_weights",
             {{"latency", config.cost_weights.latency},
              {"compute", config.cost_weights.compute},
              {"monetary", config.cost_weights.monetary}}},
            {"metric_weights", config.metric_weights},
            {"lower_is_better",
             std::vector<std::string>(config.lower_is_better.begin(),
                                      config.lower_is_better.end())},
            {"osi", {{"windows", config.osi.windows}, {"tolerances", config.osi.tolerances}}}};
}

ScenarioConfig scenario_from_json(const json& j) {
    const std::vector<std::string> errors = validate_scenario_json(j);
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "scenario config invalid (" << errors.size() << " violation"
            << (errors.size() == 1 ? "" : "s") << "):";
        for (const std::string& e : errors) msg << "\n  " << e;
        throw ConfigInvalid(msg.str());
    }
    ScenarioConfig config;
    config.scenario_id = j.at("scenario_id").get<std::string>();
    config.seed = j.at("seed").get<uint64_t>();
    config.tick_limit = j.value("tick_limit", static_cast<Tick>(1'000'000));
    for (const json& s : j.at("sub_domains")) {
        config.sub_domains.push_back(sub_domain_from_json(s));
    }
    for (const json& p : j.value("pipelines", json::array())) {
        CrossDomainPipeline pipeline;
        pipeline.pipeline_id = p.at("pipeline_id").get<std::string>();
        pipeline.n_tasks = p.at("n_tasks").get<int64_t>();
        for (const json& st : p.at("stages")) {
            pipeline.stages.push_back({st.at("sub_domain").get<std::string>(),
                                       st.at("task_type").get<std::string>()});
        }
        config.pipelines.push_back(std::move(pipeline));
    }
    if (j.contains("cost_weights")) {
        config.cost_weights.latency = j["cost_weights"].value("latency", 1.0);
        config.cost_weights.compute = j["cost_weights"].value("compute", 1.0);
        config.cost_weights.monetary = j["cost_weights"].value("monetary", 1.0);
    }
    if (j.contains("metric_weights")) {
        for (const auto& [name, w] : j["metric_weights"].items()) {
            config.metric_weights[name] = w.get<double>();
        }
    }
    if (j.contains("lower_is_better")) {
        config.lower_is_better.clear();
        for (const json& name : j["lower_is_better"]) {
            config.lower_is_better.insert(name.get<std::string>());
        }
    }
    if (j.contains("osi")) {
        config.osi.windows = j["osi"].value("windows", 4);
        if (j["osi"].contains("tolerances")) {
            config.osi.tolerances.clear();
            for (const auto& [name, tol] : j["osi"]["tolerances"].items()) {
                config.osi.tolerances[name] = tol.get<double>();
            }
        }
    }
    return config;
}

std::string config_digest(const ScenarioConfig& config) {
    return sha256_hex(scenario_to_json(config).dump());
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class Validator {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& message) {
        errors.push_back(path + ": " + message);
    }

    // Each accessor returns nullptr/nullopt after recording a violation, so
    // validation keeps going and reports every problem in one pass.
    const json* object(const json& parent, const std::string& path) {
        if (!parent.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        return &parent;
    }

    const json* field(const json& parent, const std::string& path, const std::string& name,
                      bool required = true) {
        if (!parent.is_object()) return nullptr;
        auto it = parent.find(name);
        if (it == parent.end()) {
            if (required) fail(path + "/" + name, "required field missing");
            return nullptr;
        }
        return &*it;
    }

    std::optional<std::string> str(const json& parent, const std::string& path,
                                   const std::string& name, bool required = true) {
        const json* f = field(parent, path, name, required);
        if (!f) return std::nullopt;
        if (!f->is_string()) {
            fail(path + "/" + name, "expected a string");
            return std::nullopt;
        }
        return f->get<std::string>();
    }

    std::optional<double> number(const json& parent, const std::string& path,
                                 const std::string& name, bool required = true) {
        const json* f = field(parent, path, name, required);
        if (!f) return std::nullopt;
        if (!f->is_number()) {
            fail(path + "/" + name, "expected a number");
            return std::nullopt;
        }
        return f->get<double>();
    }

    std::optional<double> number_in(const json& parent, const std::string& path,
                                    const std::string& name, double lo, double hi,
                                    bool required = true) {
        auto v = number(parent, path, name, required);
        if (v && (*v < lo || *v > hi)) {
            std::ostringstream msg;
            msg << "value " << *v << " outside [" << lo << ", " << hi << "]";
            fail(path + "/" + name, msg.str());
            return std::nullopt;
        }
        return v;
    }

    const json* array(const json& parent, const std::string& path, const std::string& name,
                      bool required = true, size_t min_size = 0) {
        const json* f = field(parent, path, name, required);
        if (!f) return nullptr;
        if (!f->is_array()) {
            fail(path + "/" + name, "expected an array");
            return nullptr;
        }
        if (f->size() < min_size) {
            fail(path + "/" + name,
                 "expected at least " + std::to_string(min_size) + " entries");
            return nullptr;
        }
        return f;
    }
};

void validate_weighted(Validator& v, const json& arr, const std::string& path,
                       const std::vector<std::string>* allowed = nullptr) {
    size_t i = 0;
    double total = 0.0;
    for (const json& e : arr) {
        const std::string p = path + "/" + std::to_string(i);
        auto value = v.str(e, p, "value");
        auto weight = v.number(e, p, "weight");
        if (weight) {
            if (*weight < 0) v.fail(p + "/weight", "weight must be >= 0");
            total += *weight;
        }
        if (value && allowed &&
            std::find(allowed->begin(), allowed->end(), *value) == allowed->end()) {
            v.fail(p + "/value", "'" + *value + "' is not an allowed value here");
        }
        ++i;
    }
    if (!arr.empty() && total <= 0.0) v.fail(path, "weights must sum to > 0");
}

void validate_sub_domain(Validator& v, const json& s, const std::string& path) {
    v.str(s, path, "label");
    auto n_tasks = v.number(s, path, "n_tasks");
    if (n_tasks && *n_tasks < 0) v.fail(path + "/n_tasks", "must be >= 0");

    // components
    std::vector<std::string> component_ids;
    std::map<std::string, const json*> components_by_id;
    if (const json* comps = v.array(s, path, "components", true, 1)) {
        size_t i = 0;
        for (const json& c : *comps) {
            const std::string p = path + "/components/" + std::to_string(i);
            auto id = v.str(c, p, "component_id");
            auto cls = v.str(c, p, "class");
            if (cls && *cls != "L2a" && *cls != "L2b") {
                v.fail(p + "/class", "must be 'L2a' or 'L2b'");
            }
            v.number_in(c, p, "capability", 0.0, 1.0);
            if (const json* types = v.array(c, p, "supported_task_types", true, 1)) {
                (void)types;
            }
            if (const json* sim = v.field(c, p, "sim")) {
                v.number_in(*sim, p + "/sim", "accuracy", 0.0, 1.0);
                auto noise = v.number(*sim, p + "/sim", "confidence_noise", false);
                if (noise && *noise < 0) v.fail(p + "/sim/confidence_noise", "must be >= 0");
                v.number_in(*sim, p + "/sim", "miscalibration_shift", -1.0, 1.0, false);
                auto h = v.number_in(*sim, p + "/sim", "hallucination_rate", 0.0, 1.0, false);
                if (h && cls && *cls == "L2a" && *h != 0.0) {
                    v.fail(p + "/sim/hallucination_rate",
                           "must be 0 for L2a components (value " + std::to_string(*h) + ")");
                }
                auto ticks = v.number(*sim, p + "/sim", "latency_ticks", false);
                if (ticks && *ticks < 0) v.fail(p + "/sim/latency_ticks", "must be >= 0");
                auto gain = v.number(*sim, p + "/sim", "context_gain", false);
                if (gain && (*gain <= 0 || *gain > 1)) {
                    v.fail(p + "/sim/context_gain", "must be in (0, 1]");
                }
            }
            if (id) {
                if (components_by_id.count(*id)) {
                    v.fail(p + "/component_id", "duplicate component id '" + *id + "'");
                }
                components_by_id[*id] = &c;
                component_ids.push_back(*id);
            }
            ++i;
        }
    }

    auto component_supports = [&](const std::string& id, const std::string& type) {
        auto it = components_by_id.find(id);
        if (it == components_by_id.end()) return false;
        const json& c = *it->second;
        if (!c.is_object() || !c.contains("supported_task_types") ||
            !c["supported_task_types"].is_array()) {
            return false;
        }
        for (const json& t : c["supported_task_types"]) {
            if (t.is_string() && t.get<std::string>() == type) return true;
        }
        return false;
    };

    // plans
    std::vector<std::string> plan_types;
    if (const json* plans = v.field(s, path, "plans")) {
        if (!plans->is_object()) {
            v.fail(path + "/plans", "expected an object keyed by task type");
        } else {
            for (const auto& [type, p] : plans->items()) {
                const std::string pp = path + "/plans/" + type;
                plan_types.push_back(type);
                if (const json* steps = v.array(p, pp, "steps", true, 1)) {
                    size_t k = 0;
                    for (const json& step : *steps) {
                        const std::string sp = pp + "/steps/" + std::to_string(k);
                        if (!step.is_string()) {
                            v.fail(sp, "expected a component id string");
                        } else if (!components_by_id.count(step.get<std::string>())) {
                            v.fail(sp, "unknown component '" + step.get<std::string>() + "'");
                        } else if (!component_supports(step.get<std::string>(), type)) {
                            v.fail(sp, "component '" + step.get<std::string>() +
                                           "' does not support task type '" + type + "'");
                        }
                        ++k;
                    }
                }
                auto mode = v.str(p, pp, "ordering_mode", false);
                if (mode && *mode != "as_listed" && *mode != "descending_capability" &&
                    *mode != "ascending_capability") {
                    v.fail(pp + "/ordering_mode", "unknown ordering mode '" + *mode + "'");
                }
            }
        }
    }

    // trigger
    if (const json* t = v.field(s, path, "trigger")) {
        auto rt = v.str(*t, path + "/trigger", "risk_threshold", false);
        if (rt && *rt != "low" && *rt != "medium" && *rt != "high") {
            v.fail(path + "/trigger/risk_threshold", "must be low|medium|high");
        }
        v.number_in(*t, path + "/trigger", "confidence_threshold", 0.0, 1.0);
        v.number_in(*t, path + "/trigger", "inconsistency_threshold", 0.0, 1.0);
        auto budget = v.number(*t, path + "/trigger", "reinvocation_budget");
        if (budget && *budget < 0) v.fail(path + "/trigger/reinvocation_budget", "must be >= 0");
    }

    // adjudicator
    if (const json* a = v.field(s, path, "adjudicator")) {
        v.number_in(*a, path + "/adjudicator", "competence", 0.0, 1.0);
    }

    // generator
    std::vector<std::string> generated_types;
    if (const json* g = v.field(s, path, "generator")) {
        const std::string gp = path + "/generator";
        if (const json* types = v.array(*g, gp, "task_types", true, 1)) {
            validate_weighted(v, *types, gp + "/task_types");
            for (const json& e : *types) {
                if (e.is_object() && e.contains("value") && e["value"].is_string()) {
                    generated_types.push_back(e["value"].get<std::string>());
                }
            }
        }
        if (const json* risks = v.array(*g, gp, "risk_classes", true, 1)) {
            static const std::vector<std::string> allowed = {"low", "medium", "high"};
            validate_weighted(v, *risks, gp + "/risk_classes", &allowed);
        }
        std::vector<std::string> numeric_features;
        if (const json* feats = v.array(*g, gp, "features", false)) {
            size_t i = 0;
            for (const json& f : *feats) {
                const std::string fp = gp + "/features/" + std::to_string(i);
                v.str(f, fp, "name");
                auto kind = v.str(f, fp, "kind", false);
                if (kind && *kind == "categorical") {
                    if (const json* cats = v.array(f, fp, "categories", true, 1)) {
                        validate_weighted(v, *cats, fp + "/categories");
                    }
                } else {
                    auto lo = v.number(f, fp, "lo", false);
                    auto hi = v.number(f, fp, "hi", false);
                    if (lo && hi && *lo >= *hi) v.fail(fp, "requires lo < hi");
                    if (f.contains("name") && f["name"].is_string()) {
                        numeric_features.push_back(f["name"].get<std::string>());
                    }
                }
                ++i;
            }
        }
        std::map<std::string, std::vector<std::string>> labels_by_type;
        if (const json* alphabets = v.field(*g, gp, "alphabets")) {
            if (alphabets->is_object()) {
                for (const auto& [type, a] : alphabets->items()) {
                    const std::string ap = gp + "/alphabets/" + type;
                    if (const json* labels = v.array(a, ap, "labels", true, 2)) {
                        for (const json& l : *labels) {
                            if (l.is_string()) {
                                labels_by_type[type].push_back(l.get<std::string>());
                            }
                        }
                    }
                    if (const json* pol = v.field(a, ap, "polarity", false)) {
                        if (pol->is_object()) {
                            for (const auto& [label, kind] : pol->items()) {
                                const auto& labels = labels_by_type[type];
                                if (std::find(labels.begin(), labels.end(), label) ==
                                    labels.end()) {
                                    v.fail(ap + "/polarity/" + label,
                                           "label not in the alphabet");
                                }
                                if (!kind.is_string() || (kind.get<std::string>() != "allow" &&
                                                          kind.get<std::string>() != "deny")) {
                                    v.fail(ap + "/polarity/" + label, "must be allow|deny");
                                }
                            }
                        }
                    }
                }
            } else {
                v.fail(gp + "/alphabets", "expected an object keyed by task type");
            }
        }
        if (const json* truth = v.field(*g, gp, "ground_truth")) {
            if (truth->is_object()) {
                for (const auto& [type, t] : truth->items()) {
                    const std::string tp = gp + "/ground_truth/" + type;
                    const std::string kind =
                        t.is_object() ? t.value("kind", "categorical") : "categorical";
                    if (kind == "threshold") {
                        auto feature = v.str(t, tp, "feature");
                        if (feature && std::find(numeric_features.begin(), numeric_features.end(),
                                                 *feature) == numeric_features.end()) {
                            v.fail(tp + "/feature",
                                   "'" + *feature + "' is not a numeric generated feature");
                        }
                        v.number(t, tp, "cut");
                        auto below = v.str(t, tp, "below");
                        auto above = v.str(t, tp, "above");
                        const auto& labels = labels_by_type[type];
                        for (const auto& lbl : {below, above}) {
                            if (lbl && !labels.empty() &&
                                std::find(labels.begin(), labels.end(), *lbl) == labels.end()) {
                                v.fail(tp, "decision '" + *lbl + "' not in the alphabet");
                            }
                        }
                        v.number_in(t, tp, "flip_probability", 0.0, 1.0, false);
                    } else if (const json* cats = v.array(t, tp, "categories", true, 1)) {
                        const auto& labels = labels_by_type[type];
                        validate_weighted(v, *cats, tp + "/categories",
                                          labels.empty() ? nullptr : &labels);
                    }
                }
            }
        }
        if (const json* ctx = v.field(*g, gp, "context", false)) {
            auto lo = v.number(*ctx, gp + "/context", "min_items", false);
            auto hi = v.number(*ctx, gp + "/context", "max_items", false);
            if (lo && *lo < 0) v.fail(gp + "/context/min_items", "must be >= 0");
            if (lo && hi && *lo > *hi) v.fail(gp + "/context", "requires min_items <= max_items");
            v.number_in(*ctx, gp + "/context", "relevant_prob", 0.0, 1.0, false);
            auto stale = v.number(*ctx, gp + "/context", "max_staleness", false);
            if (stale && *stale < 0) v.fail(gp + "/context/max_staleness", "must be >= 0");
        }
        // every generated task type needs a plan, an alphabet, and ground truth
        for (const std::string& type : generated_types) {
            if (std::find(plan_types.begin(), plan_types.end(), type) == plan_types.end()) {
                v.fail(path + "/plans", "no invocation plan for generated task type '" + type + "'");
            }
            if (!labels_by_type.count(type)) {
                v.fail(gp + "/alphabets", "no alphabet for generated task type '" + type + "'");
            }
            if (!g->is_object() || !g->contains("ground_truth") ||
                !(*g)["ground_truth"].contains(type)) {
                v.fail(gp + "/ground_truth", "no ground truth spec for task type '" + type + "'");
            }
        }
    }

    // ruleset
    if (const json* rs = v.field(s, path, "ruleset")) {
        std::set<std::pair<std::string, int>> seen;
        std::set<std::string> active;
        if (const json* rules = v.array(*rs, path + "/ruleset", "rules", false)) {
            size_t i = 0;
            for (const json& r : *rules) {
                const std::string rp = path + "/ruleset/rules/" + std::to_string(i);
                auto id = v.str(r, rp, "rule_id");
                auto version = v.number(r, rp, "version");
                if (version && *version < 1) v.fail(rp + "/version", "must be >= 1");
                if (id && version) {
                    if (!seen.emplace(*id, static_cast<int>(*version)).second) {
                        v.fail(rp, "duplicate (rule_id, version) pair");
                    }
                    if (!active.insert(*id).second) {
                        v.fail(rp + "/rule_id", "more than one active version of '" + *id + "'");
                    }
                }
                if (const json* action = v.field(r, rp, "action")) {
                    auto kind = v.str(*action, rp + "/action", "kind");
                    if (kind && *kind != "allow" && *kind != "deny" &&
                        *kind != "mandate_escalation" && *kind != "route") {
                        v.fail(rp + "/action/kind", "unknown action '" + *kind + "'");
                    }
                    if (kind && *kind == "route") {
                        auto target = v.str(*action, rp + "/action", "target");
                        if (target && !components_by_id.count(*target)) {
                            v.fail(rp + "/action/target", "unknown component '" + *target + "'");
                        }
                    }
                }
                if (const json* guard = v.array(r, rp, "guard", false)) {
                    size_t k = 0;
                    for (const json& atom : *guard) {
                        const std::string ap = rp + "/guard/" + std::to_string(k);
                        v.str(atom, ap, "lhs");
                        auto op = v.str(atom, ap, "op");
                        if (op) {
                            try {
                                compare_op_from_string(*op);
                            } catch (const ConfigInvalid&) {
                                v.fail(ap + "/op", "unknown operator '" + *op + "'");
                            }
                        }
                        if (!atom.contains("rhs")) v.fail(ap + "/rhs", "required field missing");
                        ++k;
                    }
                }
                ++i;
            }
        }
        if (const json* updates = v.array(*rs, path + "/ruleset", "update_log", false)) {
            size_t i = 0;
            for (const json& u : *updates) {
                const std::string up = path + "/ruleset/update_log/" + std::to_string(i);
                v.str(u, up, "rule_id");
                auto version = v.number(u, up, "new_version");
                if (version && *version < 1) v.fail(up + "/new_version", "must be >= 1");
                ++i;
            }
        }
    }

    // adequacy / cpr designation
    if (const json* adq = v.field(s, path, "adequacy", false)) {
        v.number_in(*adq, path + "/adequacy", "min_accuracy", 0.0, 1.0, false);
        v.number_in(*adq, path + "/adequacy", "max_calibration_error", 0.0, 1.0, false);
    }
    auto cpr_type = v.str(s, path, "cpr_task_type", false);
    if (cpr_type && !cpr_type->empty() &&
        std::find(plan_types.begin(), plan_types.end(), *cpr_type) == plan_types.end()) {
        v.fail(path + "/cpr_task_type", "no plan for task type '" + *cpr_type + "'");
    }
    auto cpr_deployed = v.str(s, path, "cpr_deployed", false);
    if (cpr_deployed && !cpr_deployed->empty() && !components_by_id.count(*cpr_deployed)) {
        v.fail(path + "/cpr_deployed", "unknown component '" + *cpr_deployed + "'");
    }

    auto horizon = v.number(s, path, "freshness_horizon", false);
    if (horizon && *horizon <= 0) v.fail(path + "/freshness_horizon", "must be > 0");
    auto frac = v.number_in(s, path, "context_supply_fraction", 0.0, 1.0, false);
    (void)frac;
    auto replicas = v.number(s, path, "ips_replicas", false);
    if (replicas && *replicas < 1) v.fail(path + "/ips_replicas", "must be >= 1");
}

} // namespace

std::vector<std::string> validate_scenario_json(const json& j) {
    Validator v;
    if (!j.is_object()) {
        v.fail("", "scenario config must be a JSON object");
        return v.errors;
    }
    v.str(j, "", "scenario_id");
    if (const json* seed = v.field(j, "", "seed")) {
        if (!seed->is_number_integer() && !seed->is_number_unsigned()) {
            v.fail("/seed", "expected an integer");
        }
    }
    auto tick_limit = v.number(j, "", "tick_limit", false);
    if (tick_limit && *tick_limit <= 0) v.fail("/tick_limit", "must be > 0");

    std::set<std::string> labels;
    std::map<std::string, std::set<std::string>> plan_types_by_label;
    if (const json* subs = v.array(j, "", "sub_domains", true, 1)) {
        size_t i = 0;
        for (const json& s : *subs) {
            const std::string path = "/sub_domains/" + std::to_string(i);
            if (v.object(s, path)) {
                validate_sub_domain(v, s, path);
                if (s.contains("label") && s["label"].is_string()) {
                    const std::string label = s["label"].get<std::string>();
                    if (!labels.insert(label).second) {
                        v.fail(path + "/label", "duplicate sub-domain label '" + label + "'");
                    }
                    if (s.contains("plans") && s["plans"].is_object()) {
                        for (const auto& [type, p] : s["plans"].items()) {
                            plan_types_by_label[label].insert(type);
                        }
                    }
                }
            }
            ++i;
        }
    }
    if (const json* pipelines = v.array(j, "", "pipelines", false)) {
        size_t i = 0;
        for (const json& p : *pipelines) {
            const std::string path = "/pipelines/" + std::to_string(i);
            v.str(p, path, "pipeline_id");
            auto n = v.number(p, path, "n_tasks");
            if (n && *n < 0) v.fail(path + "/n_tasks", "must be >= 0");
            if (const json* stages = v.array(p, path, "stages", true, 2)) {
                size_t k = 0;
                for (const json& st : *stages) {
                    const std::string sp = path + "/stages/" + std::to_string(k);
                    auto sub = v.str(st, sp, "sub_domain");
                    auto type = v.str(st, sp, "task_type");
                    if (sub && !labels.count(*sub)) {
                        v.fail(sp + "/sub_domain", "unknown sub-domain '" + *sub + "'");
                    } else if (sub && type && !plan_types_by_label[*sub].count(*type)) {
                        v.fail(sp + "/task_type", "sub-domain '" + *sub +
                                                      "' has no plan for task type '" + *type + "'");
                    }
                    ++k;
                }
            }
            ++i;
        }
    }
    if (const json* osi = v.field(j, "", "osi", false)) {
        auto windows = v.number(*osi, "/osi", "windows", false);
        if (windows && *windows < 2) v.fail("/osi/windows", "must be >= 2");
        if (osi->contains("tolerances") && osi->at("tolerances").is_object()) {
            for (const auto& [name, tol] : osi->at("tolerances").items()) {
                if (!tol.is_number() || tol.get<double>() <= 0) {
                    v.fail("/osi/tolerances/" + name, "tolerance must be > 0");
                }
            }
        }
    }
    if (const json* weights = v.field(j, "", "metric_weights", false)) {
        if (weights->is_object()) {
            for (const auto& [name, w] : weights->items()) {
                if (!is_canonical_metric(name)) {
                    v.fail("/metric_weights/" + name, "not a canonical metric name");
                }
                if (!w.is_number() || w.get<double>() < 0) {
                    v.fail("/metric_weights/" + name, "weight must be a number >= 0");
                }
            }
        }
    }
    return v.errors;
}

} // namespace trace
