#pragma once

#include "trace/evidence.hpp"
#include "trace/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace trace {

// Everything one task's passage through the stack produced.
struct TaskResult {
    TaskInstance task;
    EvidenceTrail trail;
    std::string final_decision;
    double final_confidence = 0.0;
    bool escalated = false;
    bool vetoed = false;
    CostVector total_cost;
    Tick finalized_at = 0;
};

struct AbsorptionStats {
    int64_t first_pass_wrong = 0;
    int64_t corrected = 0;

    // Fraction of first-pass errors the tiered policy absorbed before
    // finalization; vacuously 1.0 when the first pass made no errors.
    double absorption() const {
        if (first_pass_wrong == 0) return 1.0;
        return static_cast<double>(corrected) / static_cast<double>(first_pass_wrong);
    }
};

struct RunResult {
    ScenarioConfig config;  // as executed
    // Per sub-domain, in canonical (task_id) order.
    std::map<std::string, std::vector<TaskResult>> tasks;
    // Per sub-domain control trail carrying autonomy_change events.
    std::map<std::string, EvidenceTrail> control_trails;
    std::map<std::string, TrustReport> sub_domain_reports;
    TrustReport platform_report;
    std::map<std::string, AbsorptionStats> absorption_by_sub_domain;
    AbsorptionStats absorption;
    Tick max_tick = 0;
    int64_t n_generated = 0;
    int64_t n_finalized = 0;
};

// Executes a scenario deterministically: per-task randomness comes from
// counter-based streams keyed by (seed, task_id, purpose), so the output is
// byte-identical for any worker count. Throws ConfigInvalid /
// TickLimitExceeded.
RunResult run_scenario(const ScenarioConfig& config, int workers = 1);

// Platform-level error absorption of a finished run.
double error_absorption(const RunResult& result);

// Deterministic declarative task generation, keyed by (seed, task_id).
TaskInstance generate_task(uint64_t seed, const SubDomainConfig& sub, const std::string& task_id,
                           Tick created_at, const std::string& forced_task_type = "");

// Reserved trail id that carries a sub-domain's autonomy_change events.
std::string control_trail_id(const std::string& label);

// Serialized evidence stream for one sub-domain: control trail plus every
// task trail, ordered by task_id, one record per line.
std::string evidence_jsonl(const RunResult& result, const std::string& sub_domain);

} // namespace trace
