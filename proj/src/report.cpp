#include "trace/report.hpp"

#include "trace/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace trace {

namespace {

json absorption_json(const AbsorptionStats& a) {
    return {{"first_pass_wrong", a.first_pass_wrong},
            {"corrected", a.corrected},
            {"absorption", a.absorption()}};
}

std::string format_value(double v) {
    std::ostringstream out;
    out << std::setprecision(6) << v;
    return out.str();
}

} // namespace

json report_json(const RunResult& result) {
    json subs = json::object();
    for (const auto& [label, report] : result.sub_domain_reports) {
        json entry = trust_report_to_json(report);
        entry["absorption"] = absorption_json(result.absorption_by_sub_domain.at(label));
        subs[label] = std::move(entry);
    }
    json platform = trust_report_to_json(result.platform_report);
    platform["absorption"] = absorption_json(result.absorption);
    return {{"scenario_id", result.config.scenario_id},
            {"seed", result.config.seed},
            {"engine_version", kEngineVersion},
            {"config_digest", config_digest(result.config)},
            {"n_generated", result.n_generated},
            {"n_finalized", result.n_finalized},
            {"tick_span", json::array({0, result.max_tick})},
            {"platform", std::move(platform)},
            {"sub_domains", std::move(subs)}};
}

std::string report_markdown(const RunResult& result) {
    std::ostringstream md;
    md << "# Trust report: " << result.config.scenario_id << "\n\n";
    md << "- seed: " << result.config.seed << "\n";
    md << "- tasks finalized: " << result.n_finalized << "\n";
    md << "- tick span: [0, " << result.max_tick << "]\n";
    md << "- engine: " << kEngineVersion << "\n\n";

    auto table = [&md](const TrustReport& report, const AbsorptionStats& absorption) {
        md << "| layer | metric | value | std. uncertainty | n |\n";
        md << "|-------|--------|-------|------------------|---|\n";
        for (const std::string& name : canonical_metric_names()) {
            const MetricValue& m = report.metrics.at(name);
            md << "| " << to_string(m.layer) << " | " << name << " | " << format_value(m.value)
               << " | " << format_value(m.std_uncertainty) << " | " << m.n << " |\n";
        }
        md << "\ncomposite trust score: " << format_value(report.composite_trust_score)
           << " +- " << format_value(report.composite_uncertainty) << "\n";
        md << "error absorption: " << format_value(absorption.absorption()) << " ("
           << absorption.corrected << " of " << absorption.first_pass_wrong
           << " first-pass errors corrected)\n";
    };

    md << "## Platform\n\n";
    table(result.platform_report, result.absorption);
    for (const auto& [label, report] : result.sub_domain_reports) {
        md << "\n## Sub-domain: " << label << "\n\n";
        table(report, result.absorption_by_sub_domain.at(label));
    }
    return md.str();
}

json run_meta_json(const RunResult& result) {
    return {{"scenario_id", result.config.scenario_id},
            {"seed", result.config.seed},
            {"engine_version", kEngineVersion},
            {"config_digest", config_digest(result.config)},
            {"n_generated", result.n_generated},
            {"n_finalized", result.n_finalized},
            {"tick_span", json::array({0, result.max_tick})},
            {"resolved_config", scenario_to_json(result.config)}};
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "evidence");
    for (const auto& [label, trail] : result.control_trails) {
        std::ofstream out(out_dir / "evidence" / (label + ".jsonl"), std::ios::binary);
        if (!out) throw Error("cannot write evidence log for " + label);
        out << evidence_jsonl(result, label);
    }
    {
        std::ofstream out(out_dir / "report.json", std::ios::binary);
        out << report_json(result).dump(2) << '\n';
    }
    {
        std::ofstream out(out_dir / "report.md", std::ios::binary);
        out << report_markdown(result);
    }
    {
        std::ofstream out(out_dir / "run_meta.json", std::ios::binary);
        out << run_meta_json(result).dump(2) << '\n';
    }
}

} // namespace trace
