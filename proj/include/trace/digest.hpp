#pragma once

#include <string>
#include <string_view>

namespace trace {

// SHA-256 of the given bytes, as 64 lowercase hex characters.
std::string sha256_hex(std::string_view data);

// The all-zero digest used as prev_hash of the first record in a chain.
const std::string& zero_digest();

// True iff s is a well-formed digest (64 lowercase hex chars).
bool is_digest_hex(std::string_view s);

} // namespace trace
