#pragma once

#include "trace/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace trace {

// Every action a layer takes on a task is logged as one of these kinds.
enum class EventKind {
    rule_fired,
    invocation,
    policy_decision,
    escalation,
    adjudication,
    finalization,
    autonomy_change,
};

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

// One entry of a hash-chained, append-only evidence trail. `this_hash` is a
// SHA-256 over (seq, actor, event_kind, canonical payload, prev_hash); the
// first record of a trail links to the all-zero digest.
struct EvidenceRecord {
    uint64_t seq = 0;
    std::string actor;
    EventKind event_kind = EventKind::rule_fired;
    json payload;
    std::string prev_hash;
    std::string this_hash;
};

struct EvidenceTrail {
    std::string task_id;
    std::vector<EvidenceRecord> records;
};

// Digest over the canonical byte serialization of one record's content.
// Canonical form: compact JSON array [seq, actor, kind, payload, prev_hash]
// with object keys sorted, UTF-8, no insignificant whitespace.
std::string record_digest(uint64_t seq, const std::string& actor, EventKind kind,
                          const json& payload, const std::string& prev_hash);

// Appends one record, extending the chain. Verifies the existing chain first
// and throws ChainCorrupt if it does not check out; on success the returned
// trail is the input plus exactly one record (no observable partial append).
EvidenceTrail append_evidence(EvidenceTrail trail, const std::string& actor,
                              EventKind kind, json payload);

// True iff seq is gapless from 0 and every hash (link and content) verifies.
bool verify_trail(const EvidenceTrail& trail);

// Required payload fields by event kind; extra fields are always permitted.
using PayloadSchema = std::map<std::string, std::vector<std::string>>;

// The schema the evidence log format ships with.
const PayloadSchema& default_payload_schema();

// Fraction of records carrying every required field, present and non-empty.
// An empty trail is vacuously complete (1.0). Throws UnknownEventKind when a
// record's kind has no entry in the schema.
double trail_completeness(const EvidenceTrail& trail, const PayloadSchema& schema);

// JSON Lines persistence. One record per line, fields exactly
// {seq, actor, event_kind, payload, prev_hash, this_hash}.
std::string record_to_jsonl(const EvidenceRecord& r);
EvidenceRecord record_from_jsonl(const std::string& line);

// Splits a flat record stream (as read from one .jsonl file) into trails.
// A record with seq == 0 starts a new trail; task ids are recovered from the
// payload's task_id field when present.
std::vector<EvidenceTrail> split_trails(const std::vector<EvidenceRecord>& records);

} // namespace trace
