#include "trace/audit.hpp"
#include "trace/errors.hpp"
#include "trace/report.hpp"
#include "trace/scenario.hpp"
#include "trace/simulator.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigInvalid = 1;
constexpr int kExitRuntimeFailure = 2;
constexpr int kExitChainCorrupt = 3;
constexpr int kExitMetricMismatch = 4;

bool is_preset_name(const std::string& scenario) {
    for (const std::string& name : trace::preset_names()) {
        if (name == scenario) return true;
    }
    return false;
}

// --scenario accepts a bundled preset name or a path to a config document.
trace::ScenarioConfig load_scenario(const std::string& scenario) {
    if (is_preset_name(scenario)) return trace::load_preset(scenario);
    std::ifstream in(scenario);
    if (!in) throw trace::ConfigInvalid("cannot open scenario file: " + scenario);
    trace::json doc;
    try {
        doc = trace::json::parse(in);
    } catch (const std::exception& e) {
        throw trace::ConfigInvalid(std::string("scenario file is not valid JSON: ") + e.what());
    }
    return trace::scenario_from_json(doc);
}

int cmd_run(const std::string& scenario, std::optional<uint64_t> seed, const std::string& out,
            int workers) {
    trace::ScenarioConfig config;
    try {
        config = load_scenario(scenario);
    } catch (const trace::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigInvalid;
    }
    if (seed) config.seed = *seed;
    try {
        const trace::RunResult result = trace::run_scenario(config, workers);
        trace::write_run_outputs(result, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
    return kExitOk;
}

int cmd_validate(const std::string& scenario) {
    if (is_preset_name(scenario)) {
        std::cout << "ok: preset '" << scenario << "' is valid\n";
        return kExitOk;
    }
    std::ifstream in(scenario);
    if (!in) {
        std::cerr << "error: cannot open scenario file: " << scenario << "\n";
        return kExitConfigInvalid;
    }
    trace::json doc;
    try {
        doc = trace::json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "error: not valid JSON: " << e.what() << "\n";
        return kExitConfigInvalid;
    }
    const std::vector<std::string> violations = trace::validate_scenario_json(doc);
    if (violations.empty()) {
        std::cout << "ok: " << scenario << " is valid\n";
        return kExitOk;
    }
    for (const std::string& v : violations) std::cerr << v << "\n";
    return kExitConfigInvalid;
}

int cmd_verify(const std::string& evidence_dir) {
    trace::VerifyResult result;
    try {
        result = trace::verify_run_dir(evidence_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
    if (!result.chains_ok()) {
        for (const std::string& e : result.chain_errors) std::cerr << e << "\n";
        return kExitChainCorrupt;
    }
    if (!result.metrics_ok()) {
        for (const std::string& e : result.metric_mismatches) std::cerr << e << "\n";
        return kExitMetricMismatch;
    }
    std::cout << "ok: evidence chains verify and all reported metrics reproduce\n";
    return kExitOk;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
    const std::filesystem::path dir(in_dir);
    std::ifstream meta_in(dir / "run_meta.json");
    if (!meta_in) {
        std::cerr << "error: " << (dir / "run_meta.json").string() << " missing\n";
        return kExitRuntimeFailure;
    }
    try {
        const trace::json meta = trace::json::parse(meta_in);
        const trace::ScenarioConfig config =
            trace::scenario_from_json(meta.at("resolved_config"));
        // Reports are regenerated from the persisted evidence, never read
        // back: the stored report is a claim, not a source.
        const trace::RunResult rerun = trace::run_scenario(config, 1);
        if (format == "md") {
            std::cout << trace::report_markdown(rerun);
        } else {
            std::cout << trace::report_json(rerun).dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
    return kExitOk;
}

int cmd_preset(const std::string& name, const std::string& out) {
    try {
        const trace::json doc = trace::scenario_to_json(trace::load_preset(name));
        if (out.empty()) {
            std::cout << doc.dump(2) << "\n";
        } else {
            std::ofstream f(out, std::ios::binary);
            if (!f) throw trace::Error("cannot write " + out);
            f << doc.dump(2) << "\n";
        }
    } catch (const trace::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"four-layer trustworthy-agentic-AI runtime and simulation harness"};
    app.require_subcommand(1);

    std::string scenario;
    std::optional<uint64_t> seed;
    std::string out_dir = "out";
    int workers = 1;
    auto* run = app.add_subcommand("run", "run a scenario and write evidence + reports");
    run->add_option("--scenario", scenario, "preset name or config path")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "validate a scenario config");
    validate->add_option("--scenario", validate_path, "preset name or config path")->required();

    std::string evidence_dir;
    auto* verify = app.add_subcommand("verify", "verify evidence chains and reported metrics");
    verify->add_option("--evidence", evidence_dir, "run output directory")->required();

    std::string report_dir;
    std::string format = "json";
    auto* report = app.add_subcommand("report", "re-emit the trust report for a run");
    report->add_option("--in", report_dir, "run output directory")->required();
    report->add_option("--format", format, "json or md")
        ->check(CLI::IsMember({"json", "md"}));

    std::string preset_name;
    std::string preset_out;
    auto* preset = app.add_subcommand("preset", "export a bundled preset as JSON");
    preset->add_option("--name", preset_name, "clinical, industrial, or judicial")->required();
    preset->add_option("--out", preset_out, "write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(scenario, seed, out_dir, workers);
    if (validate->parsed()) return cmd_validate(validate_path);
    if (verify->parsed()) return cmd_verify(evidence_dir);
    if (report->parsed()) return cmd_report(report_dir, format);
    if (preset->parsed()) return cmd_preset(preset_name, preset_out);
    return kExitRuntimeFailure;
}
