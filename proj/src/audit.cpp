#include "trace/audit.hpp"

#include "trace/errors.hpp"
#include "trace/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace trace {

namespace {

// Everything the metric suite needs from one trail, extracted in one pass.
struct TrailFacts {
    std::string task_id;
    std::string task_type;
    bool has_finalization = false;
    bool escalated = false;
    bool adjudicated = false;
    bool overridden = false;
    bool warranted = false;
    bool pre_verdict_wrong = false;
    std::vector<std::string> fired_outcomes;  // rule action strings, for conflicts
    int64_t fired_count = 0;
    std::vector<std::pair<double, bool>> pairs;  // invocation (confidence, correct)
    int64_t ctx_supplied = 0;
    int64_t ctx_relevant = 0;
    double ctx_freshness_sum = 0.0;
    int candidates_spurious = 0;
    std::optional<bool> first_pass_correct;
    bool final_correct = false;
    CostVector total_cost;
    // autonomy events (control trail only): (task_type, new_level, window_end_task_id)
    std::vector<std::tuple<std::string, AutonomyLevel, std::string>> autonomy_events;
};

TrailFacts extract_facts(const EvidenceTrail& trail) {
    TrailFacts f;
    f.task_id = trail.task_id;
    for (const EvidenceRecord& rec : trail.records) {
        const json& p = rec.payload;
        switch (rec.event_kind) {
            case EventKind::rule_fired:
                f.fired_count += 1;
                f.fired_outcomes.push_back(p.value("outcome", ""));
                break;
            case EventKind::invocation:
                f.pairs.emplace_back(p.value("confidence", 0.0), p.value("correct", false));
                f.ctx_supplied += p.value("context_supplied", static_cast<int64_t>(0));
                f.ctx_relevant += p.value("context_relevant", static_cast<int64_t>(0));
                f.ctx_freshness_sum += p.value("context_freshness_sum", 0.0);
                if (p.value("attempt", 0) == 1) {
                    f.first_pass_correct = p.value("correct", false);
                }
                break;
            case EventKind::policy_decision:
                if (p.value("candidate", false) && p.value("was_spurious", false)) {
                    f.candidates_spurious += 1;
                }
                break;
            case EventKind::escalation:
                f.escalated = true;
                f.pre_verdict_wrong = p.value("pre_verdict_wrong", false);
                if (p.value("candidate", false) && p.value("was_spurious", false)) {
                    f.candidates_spurious += 1;
                }
                break;
            case EventKind::adjudication:
                f.adjudicated = true;
                f.overridden = p.value("outcome", "") == "override";
                f.warranted = p.value("warranted", false);
                break;
            case EventKind::finalization:
                f.has_finalization = true;
                f.final_correct = p.value("correct", false);
                f.task_type = p.value("task_type", "");
                f.total_cost = p.value("total_cost", CostVector{});
                break;
            case EventKind::autonomy_change:
                f.autonomy_events.emplace_back(
                    p.value("task_type", ""),
                    autonomy_level_from_string(p.value("new_level", "advise_only")),
                    p.value("justification", json::object())
                        .value("window_end_task_id", ""));
                break;
        }
    }
    return f;
}

bool record_complete(const EvidenceRecord& rec, const PayloadSchema& schema) {
    EvidenceTrail probe;
    probe.records.push_back(rec);
    return trail_completeness(probe, schema) == 1.0;
}

bool outcomes_conflict(const std::string& a, const std::string& b) {
    if ((a == "allow" && b == "deny") || (a == "deny" && b == "allow")) return true;
    if (a.rfind("route:", 0) == 0 && b.rfind("route:", 0) == 0) return a != b;
    return false;
}

// Declared fallback for components that never ran in the window.
ComponentEval declared_eval(const ComponentDescriptor& c) {
    ComponentEval e;
    e.accuracy = c.capability;
    e.ece = std::abs(c.sim.miscalibration_shift);
    e.latency = c.cost_per_invocation.latency + c.sim.latency_ticks;
    return e;
}

double perturbation_probe(const ScenarioConfig& scenario, const SubDomainConfig& sub,
                          const ComponentDescriptor& component, int64_t& hits,
                          int64_t& replicas) {
    // Probe the first supported task type that the generator can produce.
    std::string probe_type;
    for (const std::string& type : component.supported_task_types) {
        if (sub.generator.alphabets.count(type) && sub.generator.ground_truth.count(type)) {
            probe_type = type;
            break;
        }
    }
    if (probe_type.empty()) return -1.0;
    const std::string probe_id = "ips/" + sub.label + "/" + component.component_id;
    TaskInstance task = generate_task(scenario.seed, sub, probe_id, 0, probe_type);
    bool numeric = false;
    for (const auto& [name, value] : task.features) {
        if (std::holds_alternative<double>(value)) numeric = true;
    }
    if (!numeric) return -1.0;

    InvocationRequest request;
    request.task = std::move(task);
    request.supplied_context = request.task.context_items;
    request.alphabet = sub.generator.alphabets.at(probe_type).labels;
    RngStream rng(scenario.seed, probe_id + "/draws", 0);
    const double stability = input_perturbation_stability(component, request,
                                                          sub.ips_magnitude,
                                                          sub.ips_replicas, rng);
    hits += static_cast<int64_t>(std::llround(stability * sub.ips_replicas));
    replicas += sub.ips_replicas;
    return stability;
}

} // namespace

MetricParts compute_metric_parts(const ScenarioConfig& scenario, const SubDomainConfig& sub,
                                 const std::vector<const EvidenceTrail*>& trails) {
    MetricParts parts;
    const PayloadSchema& schema = default_payload_schema();
    const std::string control_id = sub.label + "--control";

    std::vector<TrailFacts> tasks;
    std::vector<std::tuple<std::string, AutonomyLevel, std::string>> autonomy_events;
    for (const EvidenceTrail* trail : trails) {
        for (const EvidenceRecord& rec : trail->records) {
            parts.etc.den += 1;
            if (record_complete(rec, schema)) parts.etc.num += 1;
        }
        TrailFacts f = extract_facts(*trail);
        if (trail->task_id == control_id) {
            autonomy_events = std::move(f.autonomy_events);
        } else {
            tasks.push_back(std::move(f));
        }
    }
    parts.n_tasks = static_cast<int64_t>(tasks.size());

    // L1: coverage from rule_fired presence; consistency from witnessed
    // conflicting pairs among co-fired rules; traceability from the log.
    std::set<std::pair<std::string, std::string>> co_pairs;
    std::set<std::pair<std::string, std::string>> conflict_pairs;
    for (const TrailFacts& t : tasks) {
        parts.rcr.den += 1;
        if (t.fired_count > 0) parts.rcr.num += 1;
    }
    // Re-walk records for rule ids (outcome strings alone cannot identify the pair).
    for (const EvidenceTrail* trail : trails) {
        if (trail->task_id == control_id) continue;
        std::vector<std::pair<std::string, std::string>> fired;  // (rule_id, outcome)
        for (const EvidenceRecord& rec : trail->records) {
            if (rec.event_kind != EventKind::rule_fired) continue;
            fired.emplace_back(rec.payload.value("rule_id", ""),
                               rec.payload.value("outcome", ""));
        }
        for (size_t i = 0; i < fired.size(); ++i) {
            for (size_t j = i + 1; j < fired.size(); ++j) {
                auto key = std::minmax(fired[i].first, fired[j].first);
                co_pairs.insert(key);
                if (outcomes_conflict(fired[i].second, fired[j].second)) {
                    conflict_pairs.insert(key);
                }
            }
        }
    }
    parts.rci.num = static_cast<double>(conflict_pairs.size());
    parts.rci.den = static_cast<double>(co_pairs.size());
    const auto [utc_complete, utc_total] = update_traceability_counts(sub.ruleset);
    parts.utc.num = static_cast<double>(utc_complete);
    parts.utc.den = static_cast<double>(utc_total);

    // L2 context + calibration pools.
    for (const TrailFacts& t : tasks) {
        parts.crp.num += static_cast<double>(t.ctx_relevant);
        parts.crp.den += static_cast<double>(t.ctx_supplied);
        parts.cfi.num += t.ctx_freshness_sum;
        parts.cfi.den += static_cast<double>(t.ctx_supplied);
        parts.ce_pairs.insert(parts.ce_pairs.end(), t.pairs.begin(), t.pairs.end());
    }

    // L2 perturbation probes (seeded, component by component).
    {
        int64_t hits = 0, replicas = 0;
        for (const ComponentDescriptor& c : sub.components) {
            perturbation_probe(scenario, sub, c, hits, replicas);
        }
        parts.ips.num = static_cast<double>(hits);
        parts.ips.den = static_cast<double>(replicas);
    }

    // L3 / L4 ratios.
    for (const TrailFacts& t : tasks) {
        if (t.escalated) {
            parts.ep.den += 1;
            if (t.pre_verdict_wrong) parts.ep.num += 1;
            parts.rbi.num += 1;
        }
        parts.rbi.den += 1;
        if (t.adjudicated) {
            parts.orate.den += 1;
            if (t.overridden) parts.orate.num += 1;
            if (t.warranted) {
                parts.snr_warranted += 1;
            } else {
                parts.snr_unwarranted += 1;
            }
        }
        parts.fpa.den += static_cast<double>(t.candidates_spurious);
        if (!t.escalated) parts.fpa.num += static_cast<double>(t.candidates_spurious);
    }

    // Tier cost: executed vs the cheapest single-invocation path per task type.
    std::map<std::string, double> minimal_by_type;
    for (const ComponentDescriptor& c : sub.components) {
        CostVector invocation_cost = c.cost_per_invocation;
        invocation_cost.latency += c.sim.latency_ticks;
        const double cost = scalarize_cost(invocation_cost, scenario.cost_weights);
        for (const std::string& type : c.supported_task_types) {
            auto it = minimal_by_type.find(type);
            if (it == minimal_by_type.end() || cost < it->second) minimal_by_type[type] = cost;
        }
    }
    for (const TrailFacts& t : tasks) {
        auto it = minimal_by_type.find(t.task_type);
        if (it == minimal_by_type.end() || it->second <= 0.0) continue;
        parts.tcc_sum += scalarize_cost(t.total_cost, scenario.cost_weights) / it->second;
        parts.tcc_n += 1;
    }

    // Autonomy boundary compliance: replay granted levels from the control
    // trail; a change takes effect for tasks after its window-end task.
    {
        std::map<std::string, AutonomyLevel> granted;
        for (const auto& [type, plan] : sub.plans) granted[type] = sub.autonomy.initial_level;
        size_t next_event = 0;
        for (const TrailFacts& t : tasks) {
            while (next_event < autonomy_events.size() &&
                   std::get<2>(autonomy_events[next_event]) < t.task_id) {
                granted[std::get<0>(autonomy_events[next_event])] =
                    std::get<1>(autonomy_events[next_event]);
                ++next_event;
            }
            const AutonomyLevel executed =
                t.adjudicated ? AutonomyLevel::act_with_review : AutonomyLevel::act_autonomously;
            auto g = granted.find(t.task_type);
            const AutonomyLevel limit =
                g == granted.end() ? sub.autonomy.initial_level : g->second;
            parts.abc.den += 1;
            if (executed <= limit) parts.abc.num += 1;
        }
    }

    // Parsimony: measured evaluations where the run produced them, declared
    // values otherwise.
    {
        std::map<std::string, std::vector<std::pair<double, bool>>> pairs_by_component;
        std::map<std::string, std::pair<double, int64_t>> latency_by_component;
        for (const EvidenceTrail* trail : trails) {
            if (trail->task_id == control_id) continue;
            for (const EvidenceRecord& rec : trail->records) {
                if (rec.event_kind != EventKind::invocation) continue;
                const std::string id = rec.payload.value("component_id", "");
                pairs_by_component[id].emplace_back(rec.payload.value("confidence", 0.0),
                                                    rec.payload.value("correct", false));
                auto& [sum, count] = latency_by_component[id];
                sum += rec.payload.value("cost", json::object()).value("latency", 0.0);
                count += 1;
            }
        }
        std::string cpr_type = sub.cpr_task_type;
        if (cpr_type.empty() && !sub.plans.empty()) cpr_type = sub.plans.begin()->first;
        if (!cpr_type.empty()) {
            std::string deployed_id = sub.cpr_deployed;
            if (deployed_id.empty()) deployed_id = sub.plans.at(cpr_type).steps.front();
            std::vector<ComponentDescriptor> inventory;
            std::map<std::string, ComponentEval> evals;
            for (const ComponentDescriptor& c : sub.components) {
                if (!c.supported_task_types.count(cpr_type)) continue;
                inventory.push_back(c);
                ComponentEval e = declared_eval(c);
                auto measured = pairs_by_component.find(c.component_id);
                if (measured != pairs_by_component.end() && !measured->second.empty()) {
                    int64_t correct = 0;
                    for (const auto& [conf, ok] : measured->second) correct += ok ? 1 : 0;
                    e.accuracy = static_cast<double>(correct) /
                                 static_cast<double>(measured->second.size());
                    e.ece = expected_calibration_error(measured->second, kEceBins);
                    const auto& [sum, count] = latency_by_component[c.component_id];
                    e.latency = sum / static_cast<double>(count);
                }
                evals[c.component_id] = e;
            }
            for (const ComponentDescriptor& c : inventory) {
                if (c.component_id == deployed_id) {
                    parts.cpr_value =
                        cpr(c, inventory, sub.adequacy, evals, scenario.cost_weights);
                    break;
                }
            }
        }
    }

    // Stability over W windows of the canonical task order.
    {
        const int W = scenario.osi.windows;
        const int64_t n = static_cast<int64_t>(tasks.size());
        const int64_t size = W > 0 ? n / W : 0;
        if (size >= 1) {
            std::map<std::string, std::vector<double>> series;
            for (int w = 0; w < W; ++w) {
                const int64_t begin = w * size;
                const int64_t end = w == W - 1 ? n : (w + 1) * size;
                std::vector<std::pair<double, bool>> pairs;
                int64_t escalated = 0, reviews = 0, overrides = 0;
                for (int64_t i = begin; i < end; ++i) {
                    const TrailFacts& t = tasks[i];
                    pairs.insert(pairs.end(), t.pairs.begin(), t.pairs.end());
                    if (t.escalated) ++escalated;
                    if (t.adjudicated) {
                        ++reviews;
                        if (t.overridden) ++overrides;
                    }
                }
                const double window_n = static_cast<double>(end - begin);
                if (scenario.osi.tolerances.count("calibration_error")) {
                    series["calibration_error"].push_back(
                        pairs.empty() ? 0.0 : expected_calibration_error(pairs, kEceBins));
                }
                if (scenario.osi.tolerances.count("review_burden_index")) {
                    series["review_burden_index"].push_back(
                        window_n == 0.0 ? 0.0 : static_cast<double>(escalated) / window_n);
                }
                if (scenario.osi.tolerances.count("override_rate")) {
                    series["override_rate"].push_back(
                        reviews == 0 ? 0.0
                                     : static_cast<double>(overrides) /
                                           static_cast<double>(reviews));
                }
            }
            if (!series.empty()) {
                parts.osi_value = operational_stability_index(series, scenario.osi.tolerances);
                parts.osi_n = W;
            }
        }
    }

    // Error absorption.
    for (const TrailFacts& t : tasks) {
        if (!t.first_pass_correct.has_value() || *t.first_pass_correct) continue;
        parts.absorption.first_pass_wrong += 1;
        if (t.final_correct) parts.absorption.corrected += 1;
    }
    return parts;
}

TrustReport report_from_parts(const ScenarioConfig& scenario, const MetricParts& parts,
                              Tick tick_begin, Tick tick_end) {
    auto ratio = [](const std::string& name, const RatioParts& p, double vacuous) {
        MetricValue m;
        m.name = name;
        m.value = p.value_or(vacuous);
        m.n = static_cast<int64_t>(p.den);
        m.std_uncertainty = binomial_se(m.value, m.n);
        return m;
    };
    std::vector<MetricValue> values;
    values.push_back(ratio("rule_coverage_rate", parts.rcr, 1.0));
    {
        MetricValue m;
        m.name = "rule_consistency_index";
        m.value = parts.rci.den == 0.0 ? 1.0 : 1.0 - parts.rci.num / parts.rci.den;
        m.n = static_cast<int64_t>(parts.rci.den);
        m.std_uncertainty = binomial_se(m.value, m.n);
        values.push_back(m);
    }
    values.push_back(ratio("update_traceability_coefficient", parts.utc, 1.0));
    values.push_back(ratio("context_relevance_precision", parts.crp, 1.0));
    {
        MetricValue m;
        m.name = "context_freshness_index";
        m.value = parts.cfi.value_or(1.0);
        m.n = static_cast<int64_t>(parts.cfi.den);
        values.push_back(m);
    }
    values.push_back(ratio("input_perturbation_stability_rate", parts.ips, 1.0));
    values.push_back(ratio("escalation_precision", parts.ep, 1.0));
    {
        MetricValue m;
        m.name = "tier_cost_coefficient";
        m.value = parts.tcc_n == 0 ? 1.0 : parts.tcc_sum / static_cast<double>(parts.tcc_n);
        m.n = parts.tcc_n;
        values.push_back(m);
    }
    values.push_back(ratio("false_positive_attenuation", parts.fpa, 1.0));
    values.push_back(ratio("review_burden_index", parts.rbi, 0.0));
    values.push_back(ratio("override_rate", parts.orate, 0.0));
    {
        MetricValue m;
        m.name = "escalation_snr";
        m.value = parts.snr_warranted / std::max(1.0, parts.snr_unwarranted);
        m.n = static_cast<int64_t>(parts.snr_warranted + parts.snr_unwarranted);
        values.push_back(m);
    }
    values.push_back(ratio("evidence_trail_completeness", parts.etc, 1.0));
    {
        MetricValue m;
        m.name = "calibration_error";
        m.value = parts.ce_pairs.empty()
                      ? 0.0
                      : expected_calibration_error(parts.ce_pairs, kEceBins);
        m.n = static_cast<int64_t>(parts.ce_pairs.size());
        values.push_back(m);
    }
    values.push_back(ratio("autonomy_boundary_compliance", parts.abc, 1.0));
    {
        MetricValue m;
        m.name = "operational_stability_index";
        m.value = parts.osi_value;
        m.n = parts.osi_n;
        values.push_back(m);
    }
    {
        MetricValue m;
        m.name = "computational_parsimony_ratio";
        m.value = parts.cpr_value;
        m.n = 0;
        values.push_back(m);
    }
    return make_trust_report(std::move(values), scenario.metric_weights,
                             scenario.lower_is_better, scenario.scenario_id, scenario.seed,
                             tick_begin, tick_end);
}

MetricParts merge_parts(const std::map<std::string, MetricParts>& by_sub_domain) {
    MetricParts total;
    double cpr_sum = 0.0;
    double osi_min = 1.0;
    int64_t subs = 0;
    for (const auto& [label, p] : by_sub_domain) {
        total.etc += p.etc;
        total.rcr += p.rcr;
        total.rci += p.rci;
        total.utc += p.utc;
        total.crp += p.crp;
        total.cfi += p.cfi;
        total.ips += p.ips;
        total.ep += p.ep;
        total.fpa += p.fpa;
        total.rbi += p.rbi;
        total.orate += p.orate;
        total.abc += p.abc;
        total.snr_warranted += p.snr_warranted;
        total.snr_unwarranted += p.snr_unwarranted;
        total.ce_pairs.insert(total.ce_pairs.end(), p.ce_pairs.begin(), p.ce_pairs.end());
        total.tcc_sum += p.tcc_sum;
        total.tcc_n += p.tcc_n;
        cpr_sum += p.cpr_value;
        osi_min = std::min(osi_min, p.osi_value);
        total.osi_n += p.osi_n;
        total.absorption.first_pass_wrong += p.absorption.first_pass_wrong;
        total.absorption.corrected += p.absorption.corrected;
        total.n_tasks += p.n_tasks;
        subs += 1;
    }
    total.cpr_value = subs == 0 ? 1.0 : cpr_sum / static_cast<double>(subs);
    total.osi_value = osi_min;
    return total;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace {

void compare_reports(const std::string& scope, const json& reported, const TrustReport& actual,
                     std::vector<std::string>& mismatches) {
    TrustReport claimed;
    try {
        claimed = trust_report_from_json(reported);
    } catch (const Error& e) {
        mismatches.push_back(scope + ": malformed report (" + e.what() + ")");
        return;
    }
    for (const std::string& name : canonical_metric_names()) {
        const MetricValue& have = actual.metrics.at(name);
        auto it = claimed.metrics.find(name);
        if (it == claimed.metrics.end()) {
            mismatches.push_back(scope + "/" + name + ": missing from report");
            continue;
        }
        std::ostringstream msg;
        if (it->second.value != have.value) {
            msg << scope << "/" << name << ": reported " << it->second.value
                << ", recomputed " << have.value;
            mismatches.push_back(msg.str());
        } else if (it->second.n != have.n) {
            msg << scope << "/" << name << ": reported n=" << it->second.n
                << ", recomputed n=" << have.n;
            mismatches.push_back(msg.str());
        } else if (it->second.std_uncertainty != have.std_uncertainty) {
            msg << scope << "/" << name << ": reported u=" << it->second.std_uncertainty
                << ", recomputed u=" << have.std_uncertainty;
            mismatches.push_back(msg.str());
        }
    }
    if (claimed.composite_trust_score != actual.composite_trust_score) {
        std::ostringstream msg;
        msg << scope << "/composite_trust_score: reported " << claimed.composite_trust_score
            << ", recomputed " << actual.composite_trust_score;
        mismatches.push_back(msg.str());
    }
    if (claimed.composite_uncertainty != actual.composite_uncertainty) {
        std::ostringstream msg;
        msg << scope << "/composite_uncertainty: reported " << claimed.composite_uncertainty
            << ", recomputed " << actual.composite_uncertainty;
        mismatches.push_back(msg.str());
    }
}

void compare_absorption(const std::string& scope, const json& reported,
                        const AbsorptionStats& actual, std::vector<std::string>& mismatches) {
    if (!reported.is_object()) {
        mismatches.push_back(scope + "/absorption: missing");
        return;
    }
    if (reported.value("first_pass_wrong", static_cast<int64_t>(-1)) !=
            actual.first_pass_wrong ||
        reported.value("corrected", static_cast<int64_t>(-1)) != actual.corrected ||
        reported.value("absorption", -1.0) != actual.absorption()) {
        mismatches.push_back(scope + "/absorption: reported " + reported.dump() +
                             ", recomputed {first_pass_wrong:" +
                             std::to_string(actual.first_pass_wrong) +
                             ", corrected:" + std::to_string(actual.corrected) + "}");
    }
}

} // namespace

VerifyResult verify_run_dir(const std::filesystem::path& dir) {
    VerifyResult result;

    json meta;
    json report;
    try {
        std::ifstream meta_in(dir / "run_meta.json");
        if (!meta_in) throw Error("run_meta.json missing");
        meta = json::parse(meta_in);
        std::ifstream report_in(dir / "report.json");
        if (!report_in) throw Error("report.json missing");
        report = json::parse(report_in);
    } catch (const std::exception& e) {
        result.chain_errors.push_back(std::string("run artifacts unreadable: ") + e.what());
        return result;
    }

    ScenarioConfig config;
    try {
        config = scenario_from_json(meta.at("resolved_config"));
    } catch (const std::exception& e) {
        result.chain_errors.push_back(std::string("resolved config invalid: ") + e.what());
        return result;
    }

    std::map<std::string, MetricParts> parts_by_sub;
    std::map<std::string, TrustReport> sub_reports;
    for (const SubDomainConfig& sub : config.sub_domains) {
        const std::filesystem::path path = dir / "evidence" / (sub.label + ".jsonl");
        std::ifstream in(path);
        if (!in) {
            result.chain_errors.push_back(path.string() + ": missing evidence log");
            continue;
        }
        std::vector<EvidenceRecord> records;
        std::string line;
        size_t line_no = 0;
        bool parse_failed = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                records.push_back(record_from_jsonl(line));
            } catch (const std::exception& e) {
                result.chain_errors.push_back(path.string() + ":" + std::to_string(line_no) +
                                              ": unparseable record (" + e.what() + ")");
                parse_failed = true;
            }
        }
        if (parse_failed) continue;

        std::vector<EvidenceTrail> trails = split_trails(records);
        bool chain_ok = true;
        for (const EvidenceTrail& t : trails) {
            if (!verify_trail(t)) {
                result.chain_errors.push_back(path.string() + ": trail '" + t.task_id +
                                              "' fails hash-chain verification");
                chain_ok = false;
            }
        }
        if (!chain_ok) continue;

        std::vector<const EvidenceTrail*> ordered;
        for (const EvidenceTrail& t : trails) ordered.push_back(&t);
        std::sort(ordered.begin(), ordered.end(),
                  [](const EvidenceTrail* a, const EvidenceTrail* b) {
                      return a->task_id < b->task_id;
                  });
        MetricParts parts = compute_metric_parts(config, sub, ordered);
        Tick sub_end = 0;
        for (const EvidenceTrail* t : ordered) {
            for (const EvidenceRecord& rec : t->records) {
                if (rec.event_kind == EventKind::finalization) {
                    sub_end = std::max(sub_end,
                                       rec.payload.value("finalized_at", static_cast<Tick>(0)));
                }
            }
        }
        sub_reports[sub.label] = report_from_parts(config, parts, 0, sub_end);
        parts_by_sub[sub.label] = std::move(parts);
    }
    if (!result.chains_ok()) return result;

    Tick max_tick = 0;
    for (const auto& [label, r] : sub_reports) max_tick = std::max(max_tick, r.tick_end);
    const MetricParts platform = merge_parts(parts_by_sub);
    const TrustReport platform_report = report_from_parts(config, platform, 0, max_tick);

    for (const SubDomainConfig& sub : config.sub_domains) {
        const json& claimed = report.value("sub_domains", json::object())
                                  .value(sub.label, json::object());
        if (claimed.empty()) {
            result.metric_mismatches.push_back(sub.label + ": missing from report.json");
            continue;
        }
        compare_reports(sub.label, claimed, sub_reports.at(sub.label),
                        result.metric_mismatches);
        compare_absorption(sub.label, claimed.value("absorption", json()),
                           parts_by_sub.at(sub.label).absorption, result.metric_mismatches);
    }
    if (!report.contains("platform")) {
        result.metric_mismatches.push_back("platform: missing from report.json");
    } else {
        compare_reports("platform", report["platform"], platform_report,
                        result.metric_mismatches);
        compare_absorption("platform", report["platform"].value("absorption", json()),
                           platform.absorption, result.metric_mismatches);
    }
    return result;
}

} // namespace trace
