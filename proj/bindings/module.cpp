#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trace/audit.hpp"
#include "trace/errors.hpp"
#include "trace/report.hpp"
#include "trace/scenario.hpp"
#include "trace/simulator.hpp"

#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;

namespace {

// Configs cross the boundary as JSON text or plain Python mappings.
trace::json to_config_json(const py::object& config) {
    if (py::isinstance<py::str>(config)) {
        return trace::json::parse(config.cast<std::string>());
    }
    const py::object dumps = py::module_::import("json").attr("dumps");
    return trace::json::parse(dumps(config).cast<std::string>());
}

py::object to_py(const trace::json& j) {
    const py::object loads = py::module_::import("json").attr("loads");
    return loads(py::str(j.dump()));
}

py::dict run_scenario_py(const py::object& config, int workers) {
    const trace::ScenarioConfig parsed = trace::scenario_from_json(to_config_json(config));
    const trace::RunResult result = trace::run_scenario(parsed, workers);
    py::dict evidence;
    for (const auto& [label, trail] : result.control_trails) {
        evidence[py::str(label)] = trace::evidence_jsonl(result, label);
    }
    py::dict out;
    out["report"] = to_py(trace::report_json(result));
    out["run_meta"] = to_py(trace::run_meta_json(result));
    out["report_md"] = trace::report_markdown(result);
    out["evidence"] = evidence;
    out["error_absorption"] = result.absorption.absorption();
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "four-layer trustworthy-agentic-AI runtime and deterministic simulation harness";

    py::register_exception<trace::ConfigInvalid>(m, "ConfigInvalid");
    py::register_exception<trace::UnknownPreset>(m, "UnknownPreset");

    m.def("version", [] { return std::string(trace::kEngineVersion); });

    m.def("preset_names", [] { return trace::preset_names(); });

    m.def(
        "load_preset",
        [](const std::string& name) { return to_py(trace::scenario_to_json(trace::load_preset(name))); },
        py::arg("name"), "Return a bundled scenario preset as a config dict.");

    m.def(
        "validate_config",
        [](const py::object& config) {
            return trace::validate_scenario_json(to_config_json(config));
        },
        py::arg("config"),
        "Validate a scenario config (dict or JSON text); returns one "
        "json-path-prefixed message per violation.");

    m.def("run_scenario", &run_scenario_py, py::arg("config"), py::arg("workers") = 1,
          "Run a scenario deterministically. Returns report, run_meta, rendered "
          "markdown, per-sub-domain evidence JSONL, and the error-absorption figure.");

    m.def(
        "write_run",
        [](const py::object& config, const std::string& out_dir, int workers) {
            const trace::ScenarioConfig parsed =
                trace::scenario_from_json(to_config_json(config));
            trace::write_run_outputs(trace::run_scenario(parsed, workers), out_dir);
        },
        py::arg("config"), py::arg("out_dir"), py::arg("workers") = 1,
        "Run a scenario and persist evidence logs, report.json/md and run_meta.json.");

    m.def(
        "verify_run",
        [](const std::string& dir) {
            const trace::VerifyResult v = trace::verify_run_dir(dir);
            py::dict out;
            out["ok"] = v.ok();
            out["chain_errors"] = v.chain_errors;
            out["metric_mismatches"] = v.metric_mismatches;
            return out;
        },
        py::arg("run_dir"),
        "Re-derive every evidence chain and reported metric from a run directory.");

    m.def(
        "expected_calibration_error",
        [](const std::vector<std::pair<double, bool>>& pairs, int bins) {
            return trace::expected_calibration_error(pairs, bins);
        },
        py::arg("pairs"), py::arg("bins") = trace::kEceBins,
        "Equal-width-bin ECE over (confidence, correct) pairs.");

    m.def(
        "gum_combine",
        [](const std::vector<double>& values, const std::vector<double>& uncertainties,
           const std::vector<double>& weights) {
            if (values.size() != uncertainties.size()) {
                throw trace::WeightMismatch("values and uncertainties differ in length");
            }
            std::vector<trace::MetricValue> metrics(values.size());
            for (size_t i = 0; i < values.size(); ++i) {
                metrics[i].value = values[i];
                metrics[i].std_uncertainty = uncertainties[i];
            }
            return trace::gum_combine(metrics, weights);
        },
        py::arg("values"), py::arg("uncertainties"), py::arg("weights"),
        "Weighted combination with root-sum-square uncertainty propagation.");

    m.def(
        "canonical_metric_names", [] { return trace::canonical_metric_names(); },
        "The 17 canonical trust-metric names.");
}
