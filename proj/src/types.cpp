#include "trace/types.hpp"

#include "trace/errors.hpp"

namespace trace {

const char* to_string(RiskClass r) {
    switch (r) {
        case RiskClass::low: return "low";
        case RiskClass::medium: return "medium";
        case RiskClass::high: return "high";
    }
    return "low";
}

RiskClass risk_class_from_string(const std::string& s) {
    if (s == "low") return RiskClass::low;
    if (s == "medium") return RiskClass::medium;
    if (s == "high") return RiskClass::high;
    throw ConfigInvalid("unknown risk_class: " + s);
}

void to_json(json& j, const CostVector& c) {
    j = json{{"latency", c.latency}, {"compute", c.compute}, {"monetary", c.monetary}};
}

void from_json(const json& j, CostVector& c) {
    c.latency = j.value("latency", 0.0);
    c.compute = j.value("compute", 0.0);
    c.monetary = j.value("monetary", 0.0);
}

json feature_to_json(const FeatureValue& v) {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    return std::get<std::string>(v);
}

FeatureValue feature_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw ConfigInvalid("feature value must be number or string");
}

void to_json(json& j, const Verdict& v) {
    j = json{{"decision", v.decision},
             {"confidence", v.confidence},
             {"source", v.source},
             {"cost", v.cost}};
}

void from_json(const json& j, Verdict& v) {
    j.at("decision").get_to(v.decision);
    j.at("confidence").get_to(v.confidence);
    j.at("source").get_to(v.source);
    v.cost = j.value("cost", CostVector{});
}

} // namespace trace
