#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace trace {

using json = nlohmann::json;

// Logical time. Owned by the simulator; the runtime never reads wall clocks.
using Tick = int64_t;

enum class RiskClass { low = 0, medium = 1, high = 2 };

const char* to_string(RiskClass r);
RiskClass risk_class_from_string(const std::string& s);

// Simulated cost of one action along three axes. Addition is componentwise.
struct CostVector {
    double latency = 0.0;   // milliseconds, simulated
    double compute = 0.0;   // abstract units
    double monetary = 0.0;  // abstract units

    CostVector& operator+=(const CostVector& o) {
        latency += o.latency;
        compute += o.compute;
        monetary += o.monetary;
        return *this;
    }
    friend CostVector operator+(CostVector a, const CostVector& b) { return a += b; }
    bool operator==(const CostVector&) const = default;
};

void to_json(json& j, const CostVector& c);
void from_json(const json& j, CostVector& c);

// Feature values are numeric or categorical.
using FeatureValue = std::variant<double, std::string>;
using FeatureMap = std::map<std::string, FeatureValue>;

json feature_to_json(const FeatureValue& v);
FeatureValue feature_from_json(const json& j);

// One bounded-context entry supplied to learned components. `relevant` is
// simulator ground truth, present only on generated tasks.
struct ContextItem {
    std::string key;
    json value;
    Tick stamped_at = 0;
    std::optional<bool> relevant;
};

// A unit of work flowing through the layers.
struct TaskInstance {
    std::string task_id;
    std::string task_type;
    FeatureMap features;
    std::optional<std::string> ground_truth;  // simulator-only
    RiskClass risk_class = RiskClass::low;
    std::vector<ContextItem> context_items;
    Tick created_at = 0;
    std::string sub_domain;
};

// A component's or policy's decision with confidence and provenance.
struct Verdict {
    std::string decision;
    double confidence = 0.0;  // in [0, 1]
    std::string source;       // layer + component id, or "L1" / "L4"
    CostVector cost;
};

void to_json(json& j, const Verdict& v);
void from_json(const json& j, Verdict& v);

} // namespace trace
