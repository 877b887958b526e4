#pragma once

#include "trace/simulator.hpp"

#include <filesystem>
#include <string>

namespace trace {

inline constexpr const char* kEngineVersion = "0.1.0";

json report_json(const RunResult& result);
std::string report_markdown(const RunResult& result);
json run_meta_json(const RunResult& result);

// Writes evidence/<sub_domain>.jsonl, report.json, report.md and
// run_meta.json under out_dir. Touches nothing else.
void write_run_outputs(const RunResult& result, const std::filesystem::path& out_dir);

} // namespace trace
