#include "trace/simulator.hpp"

#include "trace/audit.hpp"
#include "trace/errors.hpp"
#include "trace/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace trace {

namespace {

std::string draw_weighted(RngStream& rng, const std::vector<std::pair<std::string, double>>& w) {
    double total = 0.0;
    for (const auto& [value, weight] : w) total += weight;
    const double u = rng.next_double() * total;
    double acc = 0.0;
    for (const auto& [value, weight] : w) {
        acc += weight;
        if (u < acc) return value;
    }
    return w.back().first;
}

std::string zero_padded(int64_t n, int width = 6) {
    std::string digits = std::to_string(n);
    if (static_cast<int>(digits.size()) < width) {
        digits.insert(0, width - digits.size(), '0');
    }
    return digits;
}

} // namespace

std::string control_trail_id(const std::string& label) { return label + "--control"; }

TaskInstance generate_task(uint64_t seed, const SubDomainConfig& sub, const std::string& task_id,
                           Tick created_at, const std::string& forced_task_type) {
    RngStream rng(seed, task_id + "/gen", 0);
    const TaskGeneratorSpec& g = sub.generator;

    TaskInstance task;
    task.task_id = task_id;
    task.sub_domain = sub.label;
    task.created_at = created_at;
    task.task_type =
        forced_task_type.empty() ? draw_weighted(rng, g.task_types) : forced_task_type;
    task.risk_class = risk_class_from_string(draw_weighted(rng, g.risk_classes));

    for (const GeneratorFeature& f : g.features) {
        if (f.kind == GeneratorFeature::Kind::uniform) {
            task.features[f.name] = rng.uniform_real(f.lo, f.hi);
        } else {
            task.features[f.name] = draw_weighted(rng, f.categories);
        }
    }

    const GroundTruthSpec& truth = g.ground_truth.at(task.task_type);
    const AlphabetSpec& alphabet = g.alphabets.at(task.task_type);
    if (truth.kind == GroundTruthSpec::Kind::categorical) {
        task.ground_truth = draw_weighted(rng, truth.categories);
    } else {
        double x = 0.0;
        auto it = task.features.find(truth.feature);
        if (it != task.features.end() && std::holds_alternative<double>(it->second)) {
            x = std::get<double>(it->second);
        }
        std::string label = x < truth.cut ? truth.below : truth.above;
        if (rng.bernoulli(truth.flip_probability)) {
            std::vector<std::string> others;
            for (const std::string& l : alphabet.labels) {
                if (l != label) others.push_back(l);
            }
            if (!others.empty()) label = others[rng.uniform_int(others.size())];
        }
        task.ground_truth = label;
    }

    const ContextGeneratorSpec& ctx = g.context;
    const int span = std::max(0, ctx.max_items - ctx.min_items);
    const int n_items =
        ctx.min_items + static_cast<int>(span == 0 ? 0 : rng.uniform_int(span + 1));
    for (int k = 0; k < n_items; ++k) {
        ContextItem item;
        item.key = "ctx" + std::to_string(k);
        item.value = task_id + "/" + item.key;
        item.stamped_at =
            created_at - static_cast<Tick>(rng.uniform_int(ctx.max_staleness + 1));
        item.relevant = rng.bernoulli(ctx.relevant_prob);
        task.context_items.push_back(std::move(item));
    }
    return task;
}

namespace {

// Per-sub-domain lookups resolved once.
struct SubRuntime {
    const SubDomainConfig* cfg = nullptr;
    std::map<std::string, const ComponentDescriptor*> by_id;
    std::map<std::string, std::vector<std::string>> fleet_by_type;  // config order

    explicit SubRuntime(const SubDomainConfig& sub) : cfg(&sub) {
        for (const ComponentDescriptor& c : sub.components) {
            by_id[c.component_id] = &c;
            for (const std::string& type : c.supported_task_types) {
                fleet_by_type[type].push_back(c.component_id);
            }
        }
    }
};

PlanContext resolve_plan(const SubRuntime& rt, const TaskInstance& task,
                         const RuleOutcome& l1_outcome) {
    const InvocationPlan& plan = rt.cfg->plans.at(task.task_type);
    PlanContext ctx;
    ctx.task_type = task.task_type;
    ctx.steps = plan.steps;
    if (plan.ordering_mode != InvocationPlan::Ordering::as_listed) {
        const bool descending = plan.ordering_mode == InvocationPlan::Ordering::descending_capability;
        std::stable_sort(ctx.steps.begin(), ctx.steps.end(),
                         [&](const std::string& a, const std::string& b) {
                             const double ca = rt.by_id.at(a)->capability;
                             const double cb = rt.by_id.at(b)->capability;
                             return descending ? ca > cb : ca < cb;
                         });
    }
    // An L1 route verdict puts its target at the head of the plan.
    if (l1_outcome.mandated_action &&
        l1_outcome.mandated_action->kind == RuleActionKind::route) {
        const std::string& target = l1_outcome.mandated_action->route_target;
        auto it = rt.by_id.find(target);
        if (it != rt.by_id.end() && it->second->supported_task_types.count(task.task_type)) {
            std::vector<std::string> reordered = {target};
            for (const std::string& s : ctx.steps) {
                if (s != target) reordered.push_back(s);
            }
            ctx.steps = std::move(reordered);
        }
    }
    auto fleet = rt.fleet_by_type.find(task.task_type);
    if (fleet != rt.fleet_by_type.end()) ctx.fleet = fleet->second;
    ctx.polarity = rt.cfg->generator.alphabets.at(task.task_type).polarity;
    return ctx;
}

int rule_version_of(const RuleSet& rules, const std::string& rule_id) {
    for (const Rule& r : rules.rules) {
        if (r.rule_id == rule_id) return r.version;
    }
    return 0;
}

TaskResult execute_task(const ScenarioConfig& scenario, const SubRuntime& rt,
                        TaskInstance task_in) {
    const SubDomainConfig& sub = *rt.cfg;
    TaskResult result;
    result.task = std::move(task_in);
    const TaskInstance& task = result.task;
    const std::string& truth = *task.ground_truth;
    const std::vector<std::string>& alphabet =
        sub.generator.alphabets.at(task.task_type).labels;

    EvidenceTrail trail;
    trail.task_id = task.task_id;

    const RuleOutcome l1_outcome = evaluate_rules(sub.ruleset, task);
    for (const auto& [rule_id, action] : l1_outcome.matched) {
        trail = append_evidence(std::move(trail), "L1", EventKind::rule_fired,
                                {{"task_id", task.task_id},
                                 {"rule_id", rule_id},
                                 {"rule_version", rule_version_of(sub.ruleset, rule_id)},
                                 {"outcome", action_to_string(action)}});
    }

    const PlanContext plan = resolve_plan(rt, task, l1_outcome);
    PolicyState state;
    state.task_id = task.task_id;
    state.risk_class = task.risk_class;
    state.budget_remaining = sub.trigger.reinvocation_budget;

    Tick now = task.created_at;
    int attempt = 0;
    const size_t total_items = task.context_items.size();
    const size_t first_supply = static_cast<size_t>(
        std::ceil(sub.context_supply_fraction * static_cast<double>(total_items)));
    std::optional<bool> first_pass_correct;
    CostVector review_cost_total;
    std::optional<ReviewOutcome> review;
    std::optional<EscalationReason> escalated_via;

    for (int guard = 0; guard < 10000; ++guard) {
        auto [decision, next_state] = step(plan, sub.trigger, l1_outcome, state);

        // Soft-trigger candidates for false-positive-attenuation accounting:
        // inconsistency candidates challenge the verdict before the latest
        // one; borderline-confidence candidates doubt the latest itself.
        bool is_candidate = false;
        bool was_spurious = false;
        if (decision.kind == PolicyDecision::Kind::reinvoke ||
            (decision.kind == PolicyDecision::Kind::escalate &&
             (decision.reason == EscalationReason::inconsistency ||
              decision.reason == EscalationReason::budget_exhausted))) {
            is_candidate = true;
            if (decision.detail.contains("inconsistency") && state.history.size() >= 2) {
                was_spurious =
                    state.history[state.history.size() - 2].second.decision == truth;
            } else if (!state.history.empty()) {
                was_spurious = state.history.back().second.decision == truth;
            }
        }

        json pd = {{"task_id", task.task_id},
                   {"decision_kind", to_string(decision.kind)},
                   {"reason", decision.detail}};
        if (decision.kind == PolicyDecision::Kind::invoke ||
            decision.kind == PolicyDecision::Kind::reinvoke) {
            pd["component_id"] = decision.component_id;
        }
        if (decision.kind == PolicyDecision::Kind::reinvoke) {
            pd["candidate"] = true;
            pd["was_spurious"] = was_spurious;
        }
        trail = append_evidence(std::move(trail), "L3", EventKind::policy_decision, std::move(pd));

        state = std::move(next_state);

        if (decision.kind == PolicyDecision::Kind::invoke ||
            decision.kind == PolicyDecision::Kind::reinvoke) {
            attempt += 1;
            const ComponentDescriptor& component = *rt.by_id.at(decision.component_id);
            InvocationRequest request;
            request.task = task;
            const size_t supply =
                attempt == 1 ? std::min(first_supply, total_items) : total_items;
            request.supplied_context.assign(task.context_items.begin(),
                                            task.context_items.begin() + supply);
            request.alphabet = alphabet;
            request.attempt = attempt;
            request.expanded_context = attempt > 1 && supply > first_supply;

            RngStream rng(scenario.seed, task.task_id + "/invoke",
                          static_cast<uint64_t>(attempt));
            const Verdict verdict = invoke(component, request, rng);

            double freshness_sum = 0.0;
            int64_t relevant = 0;
            for (const ContextItem& item : request.supplied_context) {
                const double age = static_cast<double>(now - item.stamped_at);
                freshness_sum += std::clamp(
                    1.0 - age / static_cast<double>(sub.freshness_horizon), 0.0, 1.0);
                if (item.relevant.value_or(false)) ++relevant;
            }
            const bool correct = verdict.decision == truth;
            if (attempt == 1) first_pass_correct = correct;
            trail = append_evidence(std::move(trail), verdict.source, EventKind::invocation,
                                    {{"task_id", task.task_id},
                                     {"component_id", component.component_id},
                                     {"component_class", to_string(component.component_class)},
                                     {"decision", verdict.decision},
                                     {"confidence", verdict.confidence},
                                     {"cost", verdict.cost},
                                     {"attempt", attempt},
                                     {"correct", correct},
                                     {"task_type", task.task_type},
                                     {"context_supplied", request.supplied_context.size()},
                                     {"context_relevant", relevant},
                                     {"context_freshness_sum", freshness_sum}});
            now += component.sim.latency_ticks;
            state = record_verdict(state, component.component_id, verdict);
            continue;
        }

        if (decision.kind == PolicyDecision::Kind::escalate) {
            result.escalated = true;
            escalated_via = decision.reason;
            std::optional<Verdict> pre;
            if (!state.history.empty()) pre = state.history.back().second;
            const bool pre_wrong = !pre || pre->decision != truth;
            json esc = {{"task_id", task.task_id},
                        {"trigger", to_string(decision.reason)},
                        {"risk_class", to_string(state.risk_class)},
                        {"confidence", state.accumulated_confidence},
                        {"pre_verdict_wrong", pre_wrong}};
            if (is_candidate) {
                esc["candidate"] = true;
                esc["was_spurious"] = was_spurious;
            }
            trail = append_evidence(std::move(trail), "L3", EventKind::escalation, std::move(esc));

            RngStream rng(scenario.seed, task.task_id + "/adjudicate", 0);
            review = adjudicate(sub.adjudicator, task, pre, escalated_via, alphabet, rng);
            review_cost_total += review->cost;
            now += static_cast<Tick>(std::llround(sub.adjudicator.review_cost.latency));
            json adj = {{"task_id", task.task_id},
                        {"outcome", to_string(review->action)},
                        {"warranted", review->warranted},
                        {"cost", review->cost}};
            if (review->new_decision) adj["overridden_decision"] = *review->new_decision;
            trail = append_evidence(std::move(trail), "L4", EventKind::adjudication, std::move(adj));

            switch (review->action) {
                case ReviewAction::uphold:
                    result.final_decision = pre->decision;
                    break;
                case ReviewAction::override:
                    result.final_decision = *review->new_decision;
                    break;
                case ReviewAction::veto:
                    result.final_decision = "veto";
                    result.vetoed = true;
                    break;
            }
            result.final_confidence = sub.adjudicator.competence;
            result.total_cost = state.accumulated_cost + review_cost_total;
            result.finalized_at = now;
            trail = append_evidence(
                std::move(trail), "L4", EventKind::finalization,
                {{"task_id", task.task_id},
                 {"decision", result.final_decision},
                 {"confidence", result.final_confidence},
                 {"total_cost", result.total_cost},
                 {"correct", !result.vetoed && result.final_decision == truth},
                 {"first_pass_correct",
                  first_pass_correct ? json(*first_pass_correct) : json(nullptr)},
                 {"task_type", task.task_type},
                 {"created_at", task.created_at},
                 {"finalized_at", result.finalized_at},
                 {"escalated", true}});
            break;
        }

        // finalize
        result.final_decision = decision.final_verdict.decision;
        result.final_confidence = decision.final_verdict.confidence;
        result.total_cost = state.accumulated_cost;
        result.finalized_at = now;
        trail = append_evidence(
            std::move(trail), "L3", EventKind::finalization,
            {{"task_id", task.task_id},
             {"decision", result.final_decision},
             {"confidence", result.final_confidence},
             {"total_cost", result.total_cost},
             {"correct", result.final_decision == truth},
             {"first_pass_correct",
              first_pass_correct ? json(*first_pass_correct) : json(nullptr)},
             {"task_type", task.task_type},
             {"created_at", task.created_at},
             {"finalized_at", result.finalized_at},
             {"escalated", false}});
        break;
    }

    if (result.finalized_at > scenario.tick_limit) {
        throw TickLimitExceeded("task " + task.task_id + " finalized at tick " +
                                std::to_string(result.finalized_at) + " past the limit of " +
                                std::to_string(scenario.tick_limit));
    }
    result.trail = std::move(trail);
    return result;
}

} // namespace

RunResult run_scenario(const ScenarioConfig& config, int workers) {
    if (config.sub_domains.empty()) {
        throw ConfigInvalid("/sub_domains: at least one sub-domain is required");
    }
    std::map<std::string, SubRuntime> runtimes;
    for (const SubDomainConfig& sub : config.sub_domains) {
        runtimes.emplace(sub.label, SubRuntime(sub));
    }

    // Independent work units: one per generated task, one per pipeline
    // instance (stages inside an instance are causally chained).
    struct Unit {
        const SubDomainConfig* sub = nullptr;     // task unit
        int64_t index = 0;
        const CrossDomainPipeline* pipeline = nullptr;  // pipeline unit
    };
    std::vector<Unit> units;
    for (const SubDomainConfig& sub : config.sub_domains) {
        for (int64_t i = 0; i < sub.n_tasks; ++i) units.push_back({&sub, i, nullptr});
    }
    for (const CrossDomainPipeline& p : config.pipelines) {
        for (int64_t i = 0; i < p.n_tasks; ++i) units.push_back({nullptr, i, &p});
    }

    std::vector<std::vector<TaskResult>> unit_results(units.size());
    auto run_unit = [&](size_t k) {
        const Unit& unit = units[k];
        std::vector<TaskResult> out;
        if (unit.sub) {
            const std::string task_id = unit.sub->label + "-" + zero_padded(unit.index);
            TaskInstance task =
                generate_task(config.seed, *unit.sub, task_id, unit.index);
            out.push_back(execute_task(config, runtimes.at(unit.sub->label), std::move(task)));
        } else {
            const CrossDomainPipeline& p = *unit.pipeline;
            Tick stage_tick = unit.index;
            std::string upstream;
            for (size_t s = 0; s < p.stages.size(); ++s) {
                const PipelineStage& stage = p.stages[s];
                const SubDomainConfig* sub = nullptr;
                for (const SubDomainConfig& cand : config.sub_domains) {
                    if (cand.label == stage.sub_domain) sub = &cand;
                }
                const std::string task_id = p.pipeline_id + "-" + zero_padded(unit.index) +
                                            "-s" + std::to_string(s);
                TaskInstance task = generate_task(config.seed, *sub, task_id, stage_tick,
                                                  stage.task_type);
                if (s > 0) task.features["upstream_decision"] = upstream;
                TaskResult r =
                    execute_task(config, runtimes.at(stage.sub_domain), std::move(task));
                upstream = r.final_decision;
                stage_tick = r.finalized_at + 1;  // stage k+1 strictly follows
                out.push_back(std::move(r));
            }
        }
        return out;
    };

    const int n_workers = std::max(1, workers);
    if (n_workers == 1) {
        for (size_t k = 0; k < units.size(); ++k) unit_results[k] = run_unit(k);
    } else {
        std::atomic<size_t> cursor{0};
        std::mutex failure_mutex;
        std::exception_ptr failure;
        auto worker = [&] {
            for (;;) {
                const size_t k = cursor.fetch_add(1);
                if (k >= units.size()) return;
                try {
                    unit_results[k] = run_unit(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Merge under the canonical (task_id) total order; everything after this
    // point is serial and deterministic regardless of worker interleaving.
    RunResult result;
    result.config = config;
    for (std::vector<TaskResult>& chunk : unit_results) {
        for (TaskResult& r : chunk) {
            result.n_generated += 1;
            result.max_tick = std::max(result.max_tick, r.finalized_at);
            result.tasks[r.task.sub_domain].push_back(std::move(r));
        }
    }
    for (auto& [label, tasks] : result.tasks) {
        std::sort(tasks.begin(), tasks.end(),
                  [](const TaskResult& a, const TaskResult& b) {
                      return a.task.task_id < b.task.task_id;
                  });
        result.n_finalized += static_cast<int64_t>(tasks.size());
    }

    // Autonomy ledger pass: rolling windows per task type, in canonical
    // order; every level change appends to the sub-domain control trail.
    for (const SubDomainConfig& sub : config.sub_domains) {
        EvidenceTrail control;
        control.task_id = control_trail_id(sub.label);
        AutonomyLedger ledger;
        ledger.thresholds = sub.autonomy.thresholds;
        for (const auto& [type, plan] : sub.plans) {
            ledger.levels[type] = sub.autonomy.initial_level;
        }
        std::map<std::string, std::vector<const TaskResult*>> window;
        auto tasks_it = result.tasks.find(sub.label);
        if (tasks_it != result.tasks.end()) {
            for (const TaskResult& r : tasks_it->second) {
                auto& bucket = window[r.task.task_type];
                bucket.push_back(&r);
                if (static_cast<int>(bucket.size()) < ledger.thresholds.window_min) continue;

                AutonomyWindowMetrics metrics;
                metrics.n_tasks = static_cast<int>(bucket.size());
                int64_t escalations = 0, warranted = 0, reviews = 0, overrides = 0;
                std::vector<std::pair<double, bool>> pairs;
                for (const TaskResult* t : bucket) {
                    for (const EvidenceRecord& rec : t->trail.records) {
                        if (rec.event_kind == EventKind::escalation) {
                            ++escalations;
                            if (rec.payload.value("pre_verdict_wrong", false)) ++warranted;
                        } else if (rec.event_kind == EventKind::adjudication) {
                            ++reviews;
                            if (rec.payload.value("outcome", "") == "override") ++overrides;
                        } else if (rec.event_kind == EventKind::invocation) {
                            pairs.emplace_back(rec.payload.value("confidence", 0.0),
                                               rec.payload.value("correct", false));
                        }
                    }
                }
                metrics.escalation_precision =
                    escalations == 0 ? 1.0
                                     : static_cast<double>(warranted) /
                                           static_cast<double>(escalations);
                metrics.override_rate =
                    reviews == 0 ? 0.0
                                 : static_cast<double>(overrides) / static_cast<double>(reviews);
                metrics.calibration_error =
                    pairs.empty() ? 0.0 : expected_calibration_error(pairs, kEceBins);

                auto [updated, change] =
                    update_autonomy(std::move(ledger), r.task.task_type, metrics);
                ledger = std::move(updated);
                if (change) {
                    json justification = change->justification;
                    justification["window_end_task_id"] = r.task.task_id;
                    control = append_evidence(std::move(control), "L3",
                                              EventKind::autonomy_change,
                                              {{"task_id", control.task_id},
                                               {"task_type", change->task_type},
                                               {"old_level", to_string(change->old_level)},
                                               {"new_level", to_string(change->new_level)},
                                               {"justification", justification}});
                }
                bucket.clear();
            }
        }
        result.control_trails[sub.label] = std::move(control);
    }

    // Reports: per sub-domain and platform, all derived from the trails via
    // the same audit path `verify` uses.
    std::map<std::string, MetricParts> parts_by_sub;
    for (const SubDomainConfig& sub : config.sub_domains) {
        std::vector<const EvidenceTrail*> trails;
        trails.push_back(&result.control_trails.at(sub.label));
        auto tasks_it = result.tasks.find(sub.label);
        if (tasks_it != result.tasks.end()) {
            for (const TaskResult& r : tasks_it->second) trails.push_back(&r.trail);
        }
        std::sort(trails.begin(), trails.end(),
                  [](const EvidenceTrail* a, const EvidenceTrail* b) {
                      return a->task_id < b->task_id;
                  });
        MetricParts parts = compute_metric_parts(config, sub, trails);
        Tick sub_end = 0;
        if (tasks_it != result.tasks.end()) {
            for (const TaskResult& r : tasks_it->second) {
                sub_end = std::max(sub_end, r.finalized_at);
            }
        }
        result.sub_domain_reports[sub.label] = report_from_parts(config, parts, 0, sub_end);
        result.absorption_by_sub_domain[sub.label] = parts.absorption;
        parts_by_sub[sub.label] = std::move(parts);
    }
    const MetricParts platform = merge_parts(parts_by_sub);
    result.platform_report = report_from_parts(config, platform, 0, result.max_tick);
    result.absorption = platform.absorption;
    return result;
}

double error_absorption(const RunResult& result) {
    bool any_truth = false;
    for (const auto& [label, tasks] : result.tasks) {
        for (const TaskResult& r : tasks) {
            if (r.task.ground_truth) any_truth = true;
        }
    }
    if (!result.tasks.empty() && !any_truth) {
        throw NoGroundTruth("error_absorption: run carries no ground truth");
    }
    return result.absorption.absorption();
}

std::string evidence_jsonl(const RunResult& result, const std::string& sub_domain) {
    std::vector<const EvidenceTrail*> trails;
    auto control = result.control_trails.find(sub_domain);
    if (control != result.control_trails.end()) trails.push_back(&control->second);
    auto tasks = result.tasks.find(sub_domain);
    if (tasks != result.tasks.end()) {
        for (const TaskResult& r : tasks->second) trails.push_back(&r.trail);
    }
    std::sort(trails.begin(), trails.end(), [](const EvidenceTrail* a, const EvidenceTrail* b) {
        return a->task_id < b->task_id;
    });
    std::ostringstream out;
    for (const EvidenceTrail* t : trails) {
        for (const EvidenceRecord& r : t->records) out << record_to_jsonl(r) << '\n';
    }
    return out.str();
}

} // namespace trace
