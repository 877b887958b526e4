#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace trace {

// Counter-based random stream. A stream is keyed by (seed, label, index);
// the i-th output is a pure function of (key, i), so any two streams with
// distinct keys are independent and a stream's draws never depend on what
// other streams did. This is what makes simulation output independent of
// scheduling and worker count.
class RngStream {
public:
    RngStream() = default;
    RngStream(uint64_t seed, std::string_view label, uint64_t index);

    uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_double();

    // Uniform in [lo, hi).
    double uniform_real(double lo, double hi);

    // True with probability p (p outside [0,1] clamps).
    bool bernoulli(double p);

    // Uniform integer in [0, n). n must be >= 1.
    uint64_t uniform_int(uint64_t n);

    uint64_t key() const { return key_; }

private:
    uint64_t key_ = 0;
    uint64_t counter_ = 0;
};

// Stable 64-bit hash of a label string (FNV-1a). Exposed for tests.
uint64_t hash_label(std::string_view label);

} // namespace trace
