#pragma once

#include "trace/evidence.hpp"
#include "trace/scenario.hpp"
#include "trace/simulator.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace trace {

// Pooled numerator/denominator of a ratio metric. Keeping the raw parts lets
// platform-level reports aggregate counts instead of averaging averages, and
// makes every reported ratio exactly recomputable from the logs.
struct RatioParts {
    double num = 0.0;
    double den = 0.0;

    double value_or(double vacuous) const { return den == 0.0 ? vacuous : num / den; }
    RatioParts& operator+=(const RatioParts& o) {
        num += o.num;
        den += o.den;
        return *this;
    }
};

struct MetricParts {
    RatioParts etc;        // evidence trail completeness
    RatioParts rcr;        // rule coverage
    RatioParts rci;        // rule consistency (conflicting / co-matched, complemented)
    RatioParts utc;        // update traceability
    RatioParts crp;        // context relevance precision
    RatioParts cfi;        // context freshness index
    RatioParts ips;        // perturbation stability (probe hits / replicas)
    RatioParts ep;         // escalation precision
    RatioParts fpa;        // false positive attenuation
    RatioParts rbi;        // review burden
    RatioParts orate;      // override rate
    RatioParts abc;        // autonomy boundary compliance
    double snr_warranted = 0.0;
    double snr_unwarranted = 0.0;
    std::vector<std::pair<double, bool>> ce_pairs;  // pooled (confidence, correct)
    double tcc_sum = 0.0;
    int64_t tcc_n = 0;
    double cpr_value = 1.0;
    double osi_value = 1.0;
    int64_t osi_n = 0;
    AbsorptionStats absorption;
    int64_t n_tasks = 0;
};

// Recomputes one sub-domain's metric parts from its evidence trails alone
// (plus the config for rule/update logs, cost tables, and seeded probes).
// Trails must be in canonical task_id order, control trail included.
MetricParts compute_metric_parts(const ScenarioConfig& scenario, const SubDomainConfig& sub,
                                 const std::vector<const EvidenceTrail*>& trails);

TrustReport report_from_parts(const ScenarioConfig& scenario, const MetricParts& parts,
                              Tick tick_begin, Tick tick_end);

// Platform roll-up across sub-domains (pooled counts; CPR averaged, OSI worst-case).
MetricParts merge_parts(const std::map<std::string, MetricParts>& by_sub_domain);

// Default bin count for every calibration-error computation in the suite.
inline constexpr int kEceBins = 10;

// ---------------------------------------------------------------------------
// Run-directory audit (the `verify` contract)
// ---------------------------------------------------------------------------

struct VerifyResult {
    std::vector<std::string> chain_errors;     // tampered/corrupt evidence
    std::vector<std::string> metric_mismatches;  // reported vs recomputed

    bool chains_ok() const { return chain_errors.empty(); }
    bool metrics_ok() const { return metric_mismatches.empty(); }
    bool ok() const { return chains_ok() && metrics_ok(); }
};

// Re-derives every trail and every recomputable metric from a run directory
// (evidence/*.jsonl + run_meta.json) and checks the claims in report.json.
VerifyResult verify_run_dir(const std::filesystem::path& dir);

} // namespace trace
