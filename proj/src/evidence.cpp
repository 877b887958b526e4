#include "trace/evidence.hpp"

#include "trace/digest.hpp"
#include "trace/errors.hpp"

namespace trace {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::rule_fired: return "rule_fired";
        case EventKind::invocation: return "invocation";
        case EventKind::policy_decision: return "policy_decision";
        case EventKind::escalation: return "escalation";
        case EventKind::adjudication: return "adjudication";
        case EventKind::finalization: return "finalization";
        case EventKind::autonomy_change: return "autonomy_change";
    }
    return "rule_fired";
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "rule_fired") return EventKind::rule_fired;
    if (s == "invocation") return EventKind::invocation;
    if (s == "policy_decision") return EventKind::policy_decision;
    if (s == "escalation") return EventKind::escalation;
    if (s == "adjudication") return EventKind::adjudication;
    if (s == "finalization") return EventKind::finalization;
    if (s == "autonomy_change") return EventKind::autonomy_change;
    throw UnknownEventKind("unknown event kind: " + s);
}

std::string record_digest(uint64_t seq, const std::string& actor, EventKind kind,
                          const json& payload, const std::string& prev_hash) {
    const json canonical = json::array({seq, actor, to_string(kind), payload, prev_hash});
    return sha256_hex(canonical.dump());
}

EvidenceTrail append_evidence(EvidenceTrail trail, const std::string& actor,
                              EventKind kind, json payload) {
    if (!verify_trail(trail)) {
        throw ChainCorrupt("evidence trail failed verification before append (task " +
                           trail.task_id + ")");
    }
    EvidenceRecord rec;
    rec.seq = trail.records.size();
    rec.actor = actor;
    rec.event_kind = kind;
    rec.payload = std::move(payload);
    rec.prev_hash = trail.records.empty() ? zero_digest() : trail.records.back().this_hash;
    rec.this_hash = record_digest(rec.seq, rec.actor, rec.event_kind, rec.payload, rec.prev_hash);
    trail.records.push_back(std::move(rec));
    return trail;
}

bool verify_trail(const EvidenceTrail& trail) {
    std::string expect_prev = zero_digest();
    for (size_t i = 0; i < trail.records.size(); ++i) {
        const EvidenceRecord& r = trail.records[i];
        if (r.seq != i) return false;
        if (r.prev_hash != expect_prev) return false;
        if (record_digest(r.seq, r.actor, r.event_kind, r.payload, r.prev_hash) != r.this_hash) {
            return false;
        }
        expect_prev = r.this_hash;
    }
    return true;
}

const PayloadSchema& default_payload_schema() {
    static const PayloadSchema schema = {
        {"rule_fired", {"rule_id", "rule_version", "outcome"}},
        {"invocation", {"component_id", "component_class", "decision", "confidence", "cost"}},
        {"policy_decision", {"decision_kind", "reason"}},
        {"escalation", {"trigger", "risk_class", "confidence"}},
        {"adjudication", {"outcome"}},
        {"finalization", {"decision", "confidence", "total_cost"}},
        {"autonomy_change", {"task_type", "old_level", "new_level", "justification"}},
    };
    return schema;
}

namespace {

bool field_present_nonempty(const json& payload, const std::string& field) {
    auto it = payload.find(field);
    if (it == payload.end() || it->is_null()) return false;
    if (it->is_string()) return !it->get_ref<const std::string&>().empty();
    if (it->is_object() || it->is_array()) return !it->empty();
    return true;
}

} // namespace

double trail_completeness(const EvidenceTrail& trail, const PayloadSchema& schema) {
    if (trail.records.empty()) return 1.0;
    size_t complete = 0;
    for (const EvidenceRecord& r : trail.records) {
        auto it = schema.find(to_string(r.event_kind));
        if (it == schema.end()) {
            throw UnknownEventKind(std::string("no schema entry for event kind: ") +
                                   to_string(r.event_kind));
        }
        bool ok = true;
        for (const std::string& field : it->second) {
            if (!field_present_nonempty(r.payload, field)) {
                ok = false;
                break;
            }
        }
        if (ok) ++complete;
    }
    return static_cast<double>(complete) / static_cast<double>(trail.records.size());
}

std::string record_to_jsonl(const EvidenceRecord& r) {
    const json j = {{"seq", r.seq},
                    {"actor", r.actor},
                    {"event_kind", to_string(r.event_kind)},
                    {"payload", r.payload},
                    {"prev_hash", r.prev_hash},
                    {"this_hash", r.this_hash}};
    return j.dump();
}

EvidenceRecord record_from_jsonl(const std::string& line) {
    const json j = json::parse(line);
    EvidenceRecord r;
    r.seq = j.at("seq").get<uint64_t>();
    r.actor = j.at("actor").get<std::string>();
    r.event_kind = event_kind_from_string(j.at("event_kind").get<std::string>());
    r.payload = j.at("payload");
    r.prev_hash = j.at("prev_hash").get<std::string>();
    r.this_hash = j.at("this_hash").get<std::string>();
    return r;
}

std::vector<EvidenceTrail> split_trails(const std::vector<EvidenceRecord>& records) {
    std::vector<EvidenceTrail> trails;
    for (const EvidenceRecord& r : records) {
        if (r.seq == 0 || trails.empty()) trails.emplace_back();
        EvidenceTrail& t = trails.back();
        if (t.records.empty() && r.payload.is_object() && r.payload.contains("task_id")) {
            t.task_id = r.payload["task_id"].get<std::string>();
        }
        t.records.push_back(r);
    }
    return trails;
}

} // namespace trace
