#include "trace/rng.hpp"

#include <algorithm>

namespace trace {

namespace {

// splitmix64 finalizer; the standard 64-bit avalanche mix.
uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

uint64_t hash_label(std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RngStream::RngStream(uint64_t seed, std::string_view label, uint64_t index) {
    uint64_t k = mix64(seed);
    k = mix64(k ^ hash_label(label));
    k = mix64(k ^ index);
    key_ = k;
}

uint64_t RngStream::next_u64() {
    return mix64(key_ ^ (counter_++ * 0x9e3779b97f4a7c15ULL));
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_real(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

bool RngStream::bernoulli(double p) {
    p = std::clamp(p, 0.0, 1.0);
    return next_double() < p;
}

uint64_t RngStream::uniform_int(uint64_t n) {
    if (n <= 1) {
        if (n == 1) return 0;
        n = 1;
    }
    // Rejection sampling against the largest multiple of n below 2^64.
    const uint64_t limit = n * (UINT64_MAX / n);
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
}

} // namespace trace
