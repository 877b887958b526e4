#pragma once

#include <stdexcept>
#include <string>

namespace trace {

// Base class for all runtime-detectable contract violations. Each module
// throws a named subclass so callers (and tests) can match on the exact
// failure kind.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define TRACE_DEFINE_ERROR(Name)                                     \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what) : Error(what) {}      \
    }

// core / evidence
TRACE_DEFINE_ERROR(ChainCorrupt);
TRACE_DEFINE_ERROR(UnknownEventKind);

// l1_rules
TRACE_DEFINE_ERROR(EmptyCorpus);

// l2_inventory
TRACE_DEFINE_ERROR(UnsupportedTaskType);
TRACE_DEFINE_ERROR(EmptyInput);
TRACE_DEFINE_ERROR(NoNumericFeatures);
TRACE_DEFINE_ERROR(NonPositiveHorizon);
TRACE_DEFINE_ERROR(MissingRelevanceLabels);

// l3_policy
TRACE_DEFINE_ERROR(PhaseViolation);
TRACE_DEFINE_ERROR(TooFewVerdicts);
TRACE_DEFINE_ERROR(ZeroMinimalCost);
TRACE_DEFINE_ERROR(InsufficientWindow);

// l4_supervision
TRACE_DEFINE_ERROR(NotEscalated);
TRACE_DEFINE_ERROR(EmptyRun);

// metrics
TRACE_DEFINE_ERROR(InadequateDeployment);
TRACE_DEFINE_ERROR(NoAdequateComponent);
TRACE_DEFINE_ERROR(WeightMismatch);
TRACE_DEFINE_ERROR(SingleWindow);
TRACE_DEFINE_ERROR(IncompleteRun);

// simulator / config
TRACE_DEFINE_ERROR(ConfigInvalid);
TRACE_DEFINE_ERROR(TickLimitExceeded);
TRACE_DEFINE_ERROR(UnknownPreset);
TRACE_DEFINE_ERROR(NoGroundTruth);

#undef TRACE_DEFINE_ERROR

} // namespace trace
