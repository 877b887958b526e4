#include "trace/digest.hpp"
#include "trace/errors.hpp"
#include "trace/scenario.hpp"

namespace trace {

namespace {

GuardAtom atom(std::string lhs, CompareOp op, json rhs) {
    GuardAtom a;
    a.lhs = std::move(lhs);
    a.op = op;
    a.rhs = std::move(rhs);
    return a;
}

Rule rule(std::string id, int version, int priority, std::vector<GuardAtom> guard,
          RuleActionKind kind, std::string route_target = "") {
    Rule r;
    r.rule_id = std::move(id);
    r.version = version;
    r.priority = priority;
    r.guard = std::move(guard);
    r.action.kind = kind;
    r.action.route_target = std::move(route_target);
    return r;
}

RuleUpdate update(const std::string& rule_id, int new_version, std::string author,
                  int64_t timestamp, std::string rationale, std::string prior_hash,
                  std::string new_hash) {
    RuleUpdate u;
    u.rule_id = rule_id;
    u.new_version = new_version;
    u.author = std::move(author);
    u.timestamp = timestamp;
    u.rationale = std::move(rationale);
    u.prior_version_hash = std::move(prior_hash);
    u.new_rule_hash = std::move(new_hash);
    return u;
}

ComponentDescriptor component(std::string id, ComponentClass cls, CostVector cost,
                              double capability, SimulatedComponentSpec sim,
                              std::set<std::string> task_types) {
    ComponentDescriptor c;
    c.component_id = std::move(id);
    c.component_class = cls;
    c.cost_per_invocation = cost;
    c.capability = capability;
    c.sim = std::move(sim);
    c.sim.accuracy = capability;
    c.supported_task_types = std::move(task_types);
    return c;
}

SimulatedComponentSpec sim_spec(double noise, double shift, double hallucination,
                                int latency_ticks) {
    SimulatedComponentSpec s;
    s.confidence_noise = noise;
    s.miscalibration_shift = shift;
    s.hallucination_rate = hallucination;
    s.latency_ticks = latency_ticks;
    return s;
}

std::vector<std::pair<std::string, double>> weighted(
    std::initializer_list<std::pair<std::string, double>> entries) {
    return {entries.begin(), entries.end()};
}

// The reference tiered instantiation: a calibrated L2a first pass, an L2b
// validator on boundary confidence, re-invocation on disagreement, and
// mandatory clinician hand-off on the joint trigger or an L1 red flag.
ScenarioConfig clinical_preset() {
    ScenarioConfig config;
    config.scenario_id = "clinical";
    config.seed = 42;
    config.tick_limit = 1'000'000;

    SubDomainConfig sub;
    sub.label = "clinical";
    sub.n_tasks = 5000;
    sub.freshness_horizon = 100;

    sub.components.push_back(component(
        "l2a_risk_score", ComponentClass::L2a, {2.0, 1.0, 0.01}, 0.80,
        sim_spec(0.10, 0.0, 0.0, 2), {"triage"}));
    sub.components.push_back(component(
        "l2a_vitals_model", ComponentClass::L2a, {2.0, 1.0, 0.01}, 0.75,
        sim_spec(0.10, 0.0, 0.0, 2), {"triage"}));
    sub.components.push_back(component(
        "l2b_notes_validator", ComponentClass::L2b, {50.0, 20.0, 0.5}, 0.90,
        sim_spec(0.03, 0.0, 0.0, 10), {"triage"}));

    InvocationPlan plan;
    plan.task_type = "triage";
    plan.steps = {"l2a_risk_score", "l2b_notes_validator"};
    sub.plans["triage"] = plan;

    sub.trigger.risk_threshold = RiskClass::high;
    sub.trigger.confidence_threshold = 0.75;
    sub.trigger.inconsistency_threshold = 0.5;
    sub.trigger.reinvocation_budget = 1;

    sub.adjudicator.competence = 0.95;
    sub.adjudicator.review_cost = {600.0, 0.0, 5.0};
    sub.adjudicator.veto_enabled = true;

    const Rule critical_v1 =
        rule("clin-critical-override", 1, 90, {atom("critical_flag", CompareOp::eq, "1")},
             RuleActionKind::mandate_escalation);
    const Rule critical_v2 =
        rule("clin-critical-override", 2, 100, {atom("critical_flag", CompareOp::eq, "1")},
             RuleActionKind::mandate_escalation);
    const Rule lab_deny =
        rule("clin-highrisk-lab-deny", 1, 50,
             {atom("risk_class", CompareOp::eq, "high"), atom("lab_score", CompareOp::ge, 0.98)},
             RuleActionKind::deny);
    const Rule lowrisk_allow =
        rule("clin-lowrisk-allow", 1, 10,
             {atom("risk_class", CompareOp::eq, "low"), atom("vitals_score", CompareOp::le, 0.2)},
             RuleActionKind::allow);
    const Rule routine_allow =
        rule("clin-routine-lab-allow", 1, 5,
             {atom("risk_class", CompareOp::eq, "low"), atom("lab_score", CompareOp::le, 0.5)},
             RuleActionKind::allow);
    sub.ruleset.rules = {critical_v2, lab_deny, lowrisk_allow, routine_allow};
    sub.ruleset.update_log = {
        update("clin-critical-override", 1, "j.alvarez", 1001,
               "initial red-flag escalation rule", zero_digest(),
               rule_canonical_hash(critical_v1)),
        update("clin-critical-override", 2, "j.alvarez", 1450,
               "raise precedence over routing rules", rule_canonical_hash(critical_v1),
               rule_canonical_hash(critical_v2)),
        update("clin-lowrisk-allow", 1, "m.chen", 1200,
               "fast-path for stable low-risk vitals", zero_digest(),
               rule_canonical_hash(lowrisk_allow)),
        update("clin-routine-lab-allow", 1, "m.chen", 1630,
               "routine labs in low-risk context proceed without hold", zero_digest(),
               rule_canonical_hash(routine_allow)),
    };

    sub.generator.task_types = weighted({{"triage", 1.0}});
    sub.generator.risk_classes = weighted({{"low", 0.5}, {"medium", 0.3}, {"high", 0.2}});
    sub.generator.features = {
        {"vitals_score", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
        {"lab_score", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
        {"critical_flag", GeneratorFeature::Kind::categorical, 0.0, 1.0,
         weighted({{"0", 0.97}, {"1", 0.03}})},
    };
    AlphabetSpec alphabet;
    alphabet.labels = {"treat", "discharge"};
    alphabet.polarity = {{"treat", RuleActionKind::allow}, {"discharge", RuleActionKind::deny}};
    sub.generator.alphabets["triage"] = alphabet;
    GroundTruthSpec truth;
    truth.categories = weighted({{"treat", 0.5}, {"discharge", 0.5}});
    sub.generator.ground_truth["triage"] = truth;
    sub.generator.context = {2, 5, 0.8, 60};

    sub.adequacy = {0.7, 0.2, 100.0};
    sub.cpr_task_type = "triage";
    // Escalations are a few per hundred tasks; a wider window keeps the
    // ledger's precision estimates out of quantization noise.
    sub.autonomy.thresholds.window_min = 250;
    sub.autonomy.thresholds.max_override_rate = 0.15;
    sub.autonomy.thresholds.min_escalation_precision = 0.6;

    config.sub_domains.push_back(std::move(sub));
    return config;
}

// Three sub-domains with characteristically different L2 weighting, plus the
// four-stage equipment-onboarding pipeline across administrative and operations.
ScenarioConfig industrial_preset() {
    ScenarioConfig config;
    config.scenario_id = "industrial";
    config.seed = 42;
    config.tick_limit = 1'000'000;

    // --- technology: structured sensor signals, L2a-dominant -------------
    {
        SubDomainConfig sub;
        sub.label = "technology";
        sub.n_tasks = 1500;
        sub.freshness_horizon = 80;

        SimulatedComponentSpec threshold_spec = sim_spec(0.04, 0.0, 0.0, 0);
        threshold_spec.decision_rule.kind = DecisionRule::Kind::threshold;
        threshold_spec.decision_rule.feature = "sensor_reading";
        threshold_spec.decision_rule.cut = 0.68;
        threshold_spec.decision_rule.below = "normal";
        threshold_spec.decision_rule.above = "anomaly";
        sub.components.push_back(component("l2a_sensor_threshold", ComponentClass::L2a,
                                           {5.0, 1.0, 0.04}, 0.92, threshold_spec,
                                           {"anomaly_check"}));
        sub.components.push_back(component("l2a_isolation_forest", ComponentClass::L2a,
                                           {8.0, 2.0, 0.1}, 0.90, sim_spec(0.05, 0.0, 0.0, 1),
                                           {"anomaly_check"}));
        sub.components.push_back(component("l2b_incident_scribe", ComponentClass::L2b,
                                           {500.0, 100.0, 4.0}, 0.95,
                                           sim_spec(0.02, 0.0, 0.02, 0), {"anomaly_check"}));

        InvocationPlan plan;
        plan.task_type = "anomaly_check";
        plan.steps = {"l2a_sensor_threshold"};
        sub.plans["anomaly_check"] = plan;

        sub.trigger = {RiskClass::high, 0.8, 0.5, 1};
        sub.adjudicator = {0.9, {900.0, 0.0, 10.0}, true};

        const Rule vib = rule("tech-vibration-mandate", 1, 90,
                              {atom("vibration", CompareOp::ge, 0.97)},
                              RuleActionKind::mandate_escalation);
        const Rule ok = rule("tech-nominal-allow", 1, 10,
                             {atom("sensor_reading", CompareOp::le, 0.3)}, RuleActionKind::allow);
        sub.ruleset.rules = {vib, ok};
        sub.ruleset.update_log = {
            update("tech-vibration-mandate", 1, "r.okafor", 2100,
                   "hard vibration limit from commissioning tests", zero_digest(),
                   rule_canonical_hash(vib)),
            update("tech-nominal-allow", 1, "r.okafor", 2140,
                   "skip review below the nominal band", zero_digest(),
                   rule_canonical_hash(ok)),
        };

        sub.generator.task_types = weighted({{"anomaly_check", 1.0}});
        sub.generator.risk_classes = weighted({{"low", 0.6}, {"medium", 0.3}, {"high", 0.1}});
        sub.generator.features = {
            {"sensor_reading", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
            {"vibration", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
        };
        AlphabetSpec alphabet;
        alphabet.labels = {"normal", "anomaly"};
        alphabet.polarity = {{"normal", RuleActionKind::allow},
                             {"anomaly", RuleActionKind::deny}};
        sub.generator.alphabets["anomaly_check"] = alphabet;
        GroundTruthSpec truth;
        truth.kind = GroundTruthSpec::Kind::threshold;
        truth.feature = "sensor_reading";
        truth.cut = 0.7;
        truth.below = "normal";
        truth.above = "anomaly";
        truth.flip_probability = 0.04;
        sub.generator.ground_truth["anomaly_check"] = truth;
        sub.generator.context = {1, 3, 0.9, 50};

        sub.adequacy = {0.75, 0.15, 1000.0};
        sub.cpr_task_type = "anomaly_check";
        config.sub_domains.push_back(std::move(sub));
    }

    // --- operations: condition monitoring, L2a-dominant ------------------
    {
        SubDomainConfig sub;
        sub.label = "operations";
        sub.n_tasks = 1500;
        sub.freshness_horizon = 80;

        sub.components.push_back(component(
            "l2a_condition_model", ComponentClass::L2a, {6.0, 2.0, 0.05}, 0.88,
            sim_spec(0.08, 0.0, 0.0, 1), {"maintenance_triage", "equipment_integration"}));
        sub.components.push_back(component("l2a_wear_classifier", ComponentClass::L2a,
                                           {4.0, 1.0, 0.03}, 0.80, sim_spec(0.08, 0.0, 0.0, 1),
                                           {"maintenance_triage"}));
        sub.components.push_back(component(
            "l2b_ops_validator", ComponentClass::L2b, {400.0, 80.0, 3.0}, 0.93,
            sim_spec(0.03, 0.0, 0.01, 5), {"maintenance_triage", "equipment_integration"}));

        InvocationPlan triage_plan;
        triage_plan.task_type = "maintenance_triage";
        triage_plan.steps = {"l2a_condition_model", "l2b_ops_validator"};
        sub.plans["maintenance_triage"] = triage_plan;
        InvocationPlan integration_plan;
        integration_plan.task_type = "equipment_integration";
        integration_plan.steps = {"l2a_condition_model"};
        sub.plans["equipment_integration"] = integration_plan;

        sub.trigger = {RiskClass::high, 0.85, 0.5, 1};
        sub.adjudicator = {0.9, {800.0, 0.0, 8.0}, true};

        const Rule wear = rule("ops-wear-mandate", 1, 80,
                               {atom("wear_level", CompareOp::ge, 0.985)},
                               RuleActionKind::mandate_escalation);
        const Rule low = rule("ops-lowwear-allow", 1, 10,
                              {atom("wear_level", CompareOp::le, 0.25),
                               atom("risk_class", CompareOp::eq, "low")},
                              RuleActionKind::allow);
        sub.ruleset.rules = {wear, low};
        sub.ruleset.update_log = {
            update("ops-wear-mandate", 1, "s.petrov", 2300,
                   "wear ceiling per OEM maintenance manual", zero_digest(),
                   rule_canonical_hash(wear)),
            update("ops-lowwear-allow", 1, "s.petrov", 2310,
                   "skip review for fresh equipment in low-risk context", zero_digest(),
                   rule_canonical_hash(low)),
        };

        sub.generator.task_types =
            weighted({{"maintenance_triage", 0.8}, {"equipment_integration", 0.2}});
        sub.generator.risk_classes = weighted({{"low", 0.5}, {"medium", 0.35}, {"high", 0.15}});
        sub.generator.features = {
            {"wear_level", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
            {"temp_anomaly", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
        };
        AlphabetSpec triage_alpha;
        triage_alpha.labels = {"schedule", "defer"};
        triage_alpha.polarity = {{"schedule", RuleActionKind::allow},
                                 {"defer", RuleActionKind::deny}};
        sub.generator.alphabets["maintenance_triage"] = triage_alpha;
        AlphabetSpec integ_alpha;
        integ_alpha.labels = {"integrate", "reject"};
        integ_alpha.polarity = {{"integrate", RuleActionKind::allow},
                                {"reject", RuleActionKind::deny}};
        sub.generator.alphabets["equipment_integration"] = integ_alpha;
        GroundTruthSpec triage_truth;
        triage_truth.categories = weighted({{"schedule", 0.6}, {"defer", 0.4}});
        sub.generator.ground_truth["maintenance_triage"] = triage_truth;
        GroundTruthSpec integ_truth;
        integ_truth.categories = weighted({{"integrate", 0.7}, {"reject", 0.3}});
        sub.generator.ground_truth["equipment_integration"] = integ_truth;
        sub.generator.context = {1, 4, 0.85, 60};

        sub.adequacy = {0.7, 0.2, 1000.0};
        sub.cpr_task_type = "maintenance_triage";
        sub.autonomy.thresholds.max_override_rate = 0.25;
        sub.autonomy.thresholds.min_escalation_precision = 0.4;
        sub.autonomy.thresholds.window_min = 250;
        config.sub_domains.push_back(std::move(sub));
    }

    // --- administrative: compliance rules + semantic review, L1+L2b ------
    {
        SubDomainConfig sub;
        sub.label = "administrative";
        sub.n_tasks = 1200;
        sub.freshness_horizon = 150;

        sub.components.push_back(component("l2a_doc_classifier", ComponentClass::L2a,
                                           {3.0, 1.0, 0.02}, 0.82, sim_spec(0.08, 0.0, 0.0, 1),
                                           {"procurement"}));
        sub.components.push_back(component("l2b_contract_llm", ComponentClass::L2b,
                                           {350.0, 70.0, 2.5}, 0.90,
                                           sim_spec(0.04, 0.0, 0.05, 15),
                                           {"procurement", "contract_review"}));
        sub.components.push_back(component("l2b_semantic_checker", ComponentClass::L2b,
                                           {300.0, 60.0, 2.0}, 0.88,
                                           sim_spec(0.04, 0.0, 0.03, 12),
                                           {"contract_review", "compliance_check"}));

        InvocationPlan procurement_plan;
        procurement_plan.task_type = "procurement";
        procurement_plan.steps = {"l2a_doc_classifier", "l2b_contract_llm"};
        sub.plans["procurement"] = procurement_plan;
        InvocationPlan contract_plan;
        contract_plan.task_type = "contract_review";
        contract_plan.steps = {"l2b_contract_llm", "l2b_semantic_checker"};
        sub.plans["contract_review"] = contract_plan;
        InvocationPlan compliance_plan;
        compliance_plan.task_type = "compliance_check";
        compliance_plan.steps = {"l2b_semantic_checker"};
        sub.plans["compliance_check"] = compliance_plan;

        sub.trigger = {RiskClass::high, 0.85, 0.5, 1};
        sub.adjudicator = {0.92, {1000.0, 0.0, 12.0}, true};

        const Rule amount = rule("adm-amount-mandate", 1, 90,
                                 {atom("amount", CompareOp::ge, 0.95),
                                  atom("risk_class", CompareOp::ge, "medium")},
                                 RuleActionKind::mandate_escalation);
        const Rule upstream = rule("adm-upstream-reject-deny", 1, 80,
                                   {atom("upstream_decision", CompareOp::eq, "reject")},
                                   RuleActionKind::deny);
        const Rule docs = rule("adm-missing-docs-deny", 1, 70,
                               {atom("missing_docs", CompareOp::eq, "1")}, RuleActionKind::deny);
        const Rule vendor = rule("adm-vendor-risk-deny", 1, 60,
                                 {atom("vendor_risk", CompareOp::ge, 0.9)},
                                 RuleActionKind::deny);
        const Rule small = rule("adm-small-amount-allow", 1, 20,
                                {atom("amount", CompareOp::le, 0.3),
                                 atom("missing_docs", CompareOp::eq, "0"),
                                 atom("vendor_risk", CompareOp::le, 0.5)},
                                RuleActionKind::allow);
        const Rule midrange = rule("adm-midrange-allow", 1, 10,
                                   {atom("amount", CompareOp::ge, 0.3),
                                    atom("amount", CompareOp::le, 0.85)},
                                   RuleActionKind::allow);
        sub.ruleset.rules = {amount, upstream, docs, vendor, small, midrange};
        sub.ruleset.update_log = {
            update("adm-amount-mandate", 1, "k.ibrahim", 2500,
                   "board sign-off threshold for large spend", zero_digest(),
                   rule_canonical_hash(amount)),
            update("adm-missing-docs-deny", 1, "k.ibrahim", 2510,
                   "documentation completeness gate", zero_digest(),
                   rule_canonical_hash(docs)),
            update("adm-upstream-reject-deny", 1, "k.ibrahim", 2560,
                   "propagate upstream rejection through the pipeline", zero_digest(),
                   rule_canonical_hash(upstream)),
        };

        sub.generator.task_types = weighted(
            {{"procurement", 0.4}, {"contract_review", 0.4}, {"compliance_check", 0.2}});
        sub.generator.risk_classes = weighted({{"low", 0.4}, {"medium", 0.4}, {"high", 0.2}});
        sub.generator.features = {
            {"amount", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
            {"vendor_risk", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
            {"missing_docs", GeneratorFeature::Kind::categorical, 0.0, 1.0,
             weighted({{"0", 0.92}, {"1", 0.08}})},
        };
        AlphabetSpec procurement_alpha;
        procurement_alpha.labels = {"approve", "reject"};
        procurement_alpha.polarity = {{"approve", RuleActionKind::allow},
                                      {"reject", RuleActionKind::deny}};
        sub.generator.alphabets["procurement"] = procurement_alpha;
        AlphabetSpec contract_alpha;
        contract_alpha.labels = {"approve", "revise"};
        contract_alpha.polarity = {{"approve", RuleActionKind::allow},
                                   {"revise", RuleActionKind::deny}};
        sub.generator.alphabets["contract_review"] = contract_alpha;
        AlphabetSpec compliance_alpha;
        compliance_alpha.labels = {"compliant", "noncompliant"};
        compliance_alpha.polarity = {{"compliant", RuleActionKind::allow},
                                     {"noncompliant", RuleActionKind::deny}};
        sub.generator.alphabets["compliance_check"] = compliance_alpha;
        GroundTruthSpec procurement_truth;
        procurement_truth.categories = weighted({{"approve", 0.7}, {"reject", 0.3}});
        sub.generator.ground_truth["procurement"] = procurement_truth;
        GroundTruthSpec contract_truth;
        contract_truth.categories = weighted({{"approve", 0.6}, {"revise", 0.4}});
        sub.generator.ground_truth["contract_review"] = contract_truth;
        GroundTruthSpec compliance_truth;
        compliance_truth.categories = weighted({{"compliant", 0.75}, {"noncompliant", 0.25}});
        sub.generator.ground_truth["compliance_check"] = compliance_truth;
        sub.generator.context = {2, 6, 0.75, 200};

        sub.adequacy = {0.65, 0.25, 1500.0};
        sub.cpr_task_type = "procurement";
        sub.autonomy.thresholds.max_override_rate = 0.25;
        sub.autonomy.thresholds.min_escalation_precision = 0.4;
        sub.autonomy.thresholds.window_min = 250;
        config.sub_domains.push_back(std::move(sub));
    }

    CrossDomainPipeline pipeline;
    pipeline.pipeline_id = "equipment_onboarding";
    pipeline.n_tasks = 250;
    pipeline.stages = {{"administrative", "procurement"},
                       {"administrative", "contract_review"},
                       {"administrative", "compliance_check"},
                       {"operations", "equipment_integration"}};
    config.pipelines.push_back(std::move(pipeline));
    return config;
}

// Judicial assistant: a hallucinating retrieval assistant, a mandatory
// verification pass, and a high-competence judge behind the trigger.
ScenarioConfig judicial_preset() {
    ScenarioConfig config;
    config.scenario_id = "judicial";
    config.seed = 42;
    config.tick_limit = 1'000'000;

    SubDomainConfig sub;
    sub.label = "judicial";
    sub.n_tasks = 2500;
    sub.freshness_horizon = 200;

    sub.components.push_back(component("l2a_precedent_ranker", ComponentClass::L2a,
                                       {10.0, 2.0, 0.1}, 0.85, sim_spec(0.06, 0.0, 0.0, 2),
                                       {"precedent_review"}));
    // 0.17: the observed hallucination rate of retrieval-augmented legal
    // assistants this preset models.
    sub.components.push_back(component("l2b_legal_rag", ComponentClass::L2b,
                                       {450.0, 90.0, 3.5}, 0.78, sim_spec(0.05, 0.0, 0.17, 20),
                                       {"precedent_review", "draft_review"}));
    sub.components.push_back(component("l2b_hallucination_verifier", ComponentClass::L2b,
                                       {400.0, 80.0, 3.0}, 0.90, sim_spec(0.04, 0.0, 0.02, 15),
                                       {"precedent_review", "draft_review"}));

    InvocationPlan precedent_plan;
    precedent_plan.task_type = "precedent_review";
    precedent_plan.steps = {"l2b_legal_rag", "l2b_hallucination_verifier"};
    sub.plans["precedent_review"] = precedent_plan;
    InvocationPlan draft_plan;
    draft_plan.task_type = "draft_review";
    draft_plan.steps = {"l2b_legal_rag", "l2b_hallucination_verifier"};
    sub.plans["draft_review"] = draft_plan;

    sub.trigger = {RiskClass::medium, 0.93, 0.5, 1};
    sub.adjudicator = {0.97, {1500.0, 0.0, 20.0}, false};

    const Rule stakes_v1 = rule("jud-stakes-mandate", 1, 95,
                                {atom("claim_stakes", CompareOp::ge, 0.99)},
                                RuleActionKind::mandate_escalation);
    const Rule stakes_v2 = rule("jud-stakes-mandate", 2, 95,
                                {atom("claim_stakes", CompareOp::ge, 0.97),
                                 atom("risk_class", CompareOp::eq, "high")},
                                RuleActionKind::mandate_escalation);
    const Rule draft_route = rule("jud-draft-route", 1, 50,
                                  {atom("task_type", CompareOp::eq, "draft_review"),
                                   atom("claim_stakes", CompareOp::ge, 0.9)},
                                  RuleActionKind::route, "l2b_hallucination_verifier");
    const Rule routine = rule("jud-routine-allow", 1, 10,
                              {atom("novelty", CompareOp::le, 0.1),
                               atom("risk_class", CompareOp::eq, "low")},
                              RuleActionKind::allow);
    sub.ruleset.rules = {stakes_v2, draft_route, routine};
    sub.ruleset.update_log = {
        update("jud-stakes-mandate", 1, "o.kovalenko", 3100,
               "mandatory review above the stakes ceiling", zero_digest(),
               rule_canonical_hash(stakes_v1)),
        update("jud-stakes-mandate", 2, "o.kovalenko", 3400,
               "narrow the mandate to high-risk matters after triage backlog",
               rule_canonical_hash(stakes_v1), rule_canonical_hash(stakes_v2)),
        update("jud-draft-route", 1, "o.kovalenko", 3200, "", zero_digest(),
               rule_canonical_hash(draft_route)),
        update("jud-routine-allow", 1, "d.meyer", 3250,
               "routine low-novelty matters proceed without hold", zero_digest(),
               rule_canonical_hash(routine)),
    };

    sub.generator.task_types = weighted({{"precedent_review", 0.7}, {"draft_review", 0.3}});
    sub.generator.risk_classes = weighted({{"low", 0.3}, {"medium", 0.4}, {"high", 0.3}});
    sub.generator.features = {
        {"claim_stakes", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
        {"novelty", GeneratorFeature::Kind::uniform, 0.0, 1.0, {}},
    };
    AlphabetSpec precedent_alpha;
    precedent_alpha.labels = {"cite", "reject_citation"};
    precedent_alpha.polarity = {{"cite", RuleActionKind::allow},
                                {"reject_citation", RuleActionKind::deny}};
    sub.generator.alphabets["precedent_review"] = precedent_alpha;
    AlphabetSpec draft_alpha;
    draft_alpha.labels = {"accept", "revise"};
    draft_alpha.polarity = {{"accept", RuleActionKind::allow},
                            {"revise", RuleActionKind::deny}};
    sub.generator.alphabets["draft_review"] = draft_alpha;
    GroundTruthSpec precedent_truth;
    precedent_truth.categories = weighted({{"cite", 0.55}, {"reject_citation", 0.45}});
    sub.generator.ground_truth["precedent_review"] = precedent_truth;
    GroundTruthSpec draft_truth;
    draft_truth.categories = weighted({{"accept", 0.6}, {"revise", 0.4}});
    sub.generator.ground_truth["draft_review"] = draft_truth;
    sub.generator.context = {3, 6, 0.7, 300};

    sub.adequacy = {0.5, 0.45, 2000.0};
    sub.cpr_task_type = "precedent_review";

    config.sub_domains.push_back(std::move(sub));
    return config;
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"clinical", "industrial", "judicial"};
    return names;
}

ScenarioConfig load_preset(const std::string& name) {
    if (name == "clinical") return clinical_preset();
    if (name == "industrial") return industrial_preset();
    if (name == "judicial") return judicial_preset();
    throw UnknownPreset("unknown preset '" + name + "' (available: clinical, industrial, judicial)");
}

} // namespace trace
